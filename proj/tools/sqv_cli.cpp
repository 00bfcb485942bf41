// sqv: command-line front end for the codec, calibration, search and
// evaluation artifacts.
//
// Exit codes: 0 ok, 1 usage, 2 data / format error, 3 internal error.

#include <CLI11.hpp>

#include <cstdio>
#include <exception>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "sqv/codec/model.hpp"
#include "sqv/codec/sequence.hpp"
#include "sqv/eval/bd.hpp"
#include "sqv/eval/metrics.hpp"
#include "sqv/eval/report.hpp"
#include "sqv/eval/trace.hpp"
#include "sqv/io/frame_io.hpp"
#include "sqv/quant/calibrate.hpp"
#include "sqv/search/clips.hpp"
#include "sqv/search/search.hpp"

namespace fs = std::filesystem;
using namespace sqv;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitInternal = 3;

// Usage problems found after CLI11 accepted the flags.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A clip argument is either a synthetic spec or a file / directory.
search::Clip load_clip_arg(const std::string& arg) {
  if (arg.rfind("synthetic:", 0) == 0) return search::gen_synthetic_clip(search::parse_clip_spec(arg));
  return io::load_frames(arg);
}

std::vector<search::Clip> load_clip_args(const std::vector<std::string>& args,
                                         const std::vector<search::ClipSpec>& fallback) {
  if (args.empty()) return search::load_clips(fallback);
  std::vector<search::Clip> clips;
  for (const auto& a : args) clips.push_back(load_clip_arg(a));
  return clips;
}

void check_qualities(const std::vector<int>& qs) {
  for (int q : qs) {
    if (q < codec::kMinQuality || q > codec::kMaxQuality) throw UsageError("quality must be in 1..9");
  }
}

void write_frames(const fs::path& out, const std::vector<codec::Frame>& frames) {
  if (out.extension() == ".y4m") {
    io::write_y4m(out, frames);
  } else {
    io::write_pgm_dir(out, frames);
  }
}

struct ConfigFlags {
  std::string act_observer = "histogram";
  std::string act_scheme = "pts";
  std::string wt_observer = "histogram";
  std::string wt_scheme = "pta";
  double ma_constant = quant::kDefaultAveragingConstant;

  quant::QConfig get() const {
    quant::QConfig qc;
    qc.act_observer = quant::parse_observer(act_observer);
    qc.act_scheme = quant::parse_scheme(act_scheme);
    qc.weight_observer = quant::parse_observer(wt_observer);
    qc.weight_scheme = quant::parse_scheme(wt_scheme);
    qc.averaging_constant = ma_constant;
    for (const auto& c : quant::enumerate_configs()) {
      if (c.act_observer == qc.act_observer && c.act_scheme == qc.act_scheme &&
          c.weight_observer == qc.weight_observer && c.weight_scheme == qc.weight_scheme) {
        qc.config_id = c.config_id;
      }
    }
    return qc;
  }

  void add(CLI::App* app) {
    app->add_option("--act-observer", act_observer, "minmax | movingavg | histogram")->capture_default_str();
    app->add_option("--act-scheme", act_scheme, "pts | pta")->capture_default_str();
    app->add_option("--wt-observer", wt_observer, "minmax | movingavg | histogram")->capture_default_str();
    app->add_option("--wt-scheme", wt_scheme, "pts | pta | pcs | pca")->capture_default_str();
    app->add_option("--ma-constant", ma_constant, "moving-average constant c in (0, 1]")->capture_default_str();
  }
};

codec::Model calibrated(codec::Model model, const std::vector<search::Clip>& clips, const quant::QConfig& qc,
                        const FloatEngine& engine, const std::vector<int>& qualities) {
  const quant::Validation v = quant::validate_config(qc);
  if (!v.ok) throw ConfigError("incompatible configuration " + qc.label() + ": " + v.reason);
  model.set_quantized(quant::calibrate_and_convert(model, clips, qc, engine, qualities));
  return model;
}

int run(int argc, char** argv) {
  CLI::App app{"sqv: hyper-prior video codec with an integer hyper decoder"};
  app.require_subcommand(1);
  std::function<void()> action;

  // model new
  auto* model_cmd = app.add_subcommand("model", "model files");
  model_cmd->require_subcommand(1);
  auto* model_new = model_cmd->add_subcommand("new", "create a seeded float model");
  std::uint64_t seed = 42;
  std::string out;
  model_new->add_option("--seed", seed)->capture_default_str();
  model_new->add_option("--out", out)->required();
  model_new->callback([&] {
    action = [&] {
      const codec::Model m = codec::Model::create(seed);
      m.save(out);
      std::printf("model_id %016llx\n", static_cast<unsigned long long>(m.model_id()));
    };
  });

  std::string model_path, in_path, mode = "float", engine = "reference";
  int quality = 5;
  bool mean_offset = false;

  auto* enc = app.add_subcommand("encode", "encode a clip");
  enc->add_option("--model", model_path)->required();
  enc->add_option("--in", in_path, "y4m file, pgm file, directory of pgm, or synthetic:<kind>:<seed>")->required();
  enc->add_option("--quality", quality)->check(CLI::Range(1, 9))->capture_default_str();
  enc->add_option("--mode", mode, "float | quant")->capture_default_str();
  enc->add_option("--engine", engine)->capture_default_str();
  enc->add_option("--out", out)->required();
  enc->add_flag("--mean-offset", mean_offset, "code round(gamma y - mu) instead of round(gamma y) - mu");
  enc->callback([&] {
    action = [&] {
      const codec::Model m = codec::Model::load(model_path);
      codec::CodecOptions opt{codec::parse_hp_mode(mode), FloatEngine::parse(engine), mean_offset};
      const auto frames = load_clip_arg(in_path);
      const auto res = codec::encode_sequence(m, frames, quality, opt);
      const auto bytes = res.bitstream.serialize();
      codec::write_file(out, bytes);
      std::printf("frames %zu bytes %zu bpp %.6f\n", frames.size(), bytes.size(), eval::bpp(res.bitstream));
    };
  });

  std::string mode_check;
  auto* dec = app.add_subcommand("decode", "decode a bitstream");
  dec->add_option("--model", model_path)->required();
  dec->add_option("--in", in_path)->required();
  dec->add_option("--mode", mode_check, "float | quant; must match the stream when given");
  dec->add_option("--engine", engine)->capture_default_str();
  dec->add_option("--out", out, "output directory of pgm files, or a .y4m file")->required();
  dec->callback([&] {
    action = [&] {
      const codec::Model m = codec::Model::load(model_path);
      const auto bs = codec::Bitstream::parse(codec::read_file(in_path));
      if (!mode_check.empty() && (codec::parse_hp_mode(mode_check) == codec::HpMode::quantized) != bs.quantized()) {
        throw ConfigError(std::string("stream was coded in ") + (bs.quantized() ? "quant" : "float") + " mode");
      }
      const auto res = codec::decode_sequence(m, bs, FloatEngine::parse(engine));
      write_frames(out, res.frames);
      std::printf("frames %zu\n", res.frames.size());
    };
  });

  std::vector<std::string> clip_args;
  std::vector<int> qualities;
  ConfigFlags cfg;
  auto* cal = app.add_subcommand("calibrate", "calibrate and attach the integer hyper decoder");
  cal->add_option("--model", model_path)->required();
  cal->add_option("--clips", clip_args, "calibration clips (default: 8 synthetic clips)");
  cal->add_option("--qualities", qualities, "qualities to calibrate over (default: all)");
  cal->add_option("--engine", engine)->capture_default_str();
  cfg.add(cal);
  cal->add_option("--out", out)->required();
  cal->callback([&] {
    action = [&] {
      check_qualities(qualities);
      const auto clips = load_clip_args(clip_args, search::default_calibration_specs());
      const quant::QConfig qc = cfg.get();
      const codec::Model m =
          calibrated(codec::Model::load(model_path), clips, qc, FloatEngine::parse(engine), qualities);
      m.save(out);
      std::printf("config %d %s model_id %016llx\n", qc.config_id, qc.label().c_str(),
                  static_cast<unsigned long long>(m.model_id()));
    };
  });

  std::vector<std::string> test_args;
  std::string summary;
  unsigned threads = 0;
  auto* srch = app.add_subcommand("search", "evaluate every quantization configuration");
  srch->add_option("--model", model_path)->required();
  srch->add_option("--out", out, "results csv")->required();
  srch->add_option("--calib", clip_args, "calibration clips (default: 8 synthetic clips)");
  srch->add_option("--test", test_args, "held-out clips (default: 4 synthetic clips)");
  srch->add_option("--summary", summary, "also write the best / worst summary here");
  srch->add_option("--threads", threads, "worker threads (default: SQV_THREADS or all cores)");
  srch->callback([&] {
    action = [&] {
      const codec::Model m = codec::Model::load(model_path);
      const auto calib = load_clip_args(clip_args, search::default_calibration_specs());
      const auto test = load_clip_args(test_args, search::default_test_specs());
      search::SearchOptions opt;
      opt.threads = threads;
      const auto res = search::run_search(m, calib, test, opt);
      eval::write_text(out, search::search_csv(res));
      const std::string text = search::search_summary(res);
      if (!summary.empty()) eval::write_text(summary, text);
      std::fputs(text.c_str(), stdout);
    };
  });

  std::string engine_a = "reference", engine_b = "ulp:7";
  auto* trc = app.add_subcommand("trace", "decode twice and compare every traced signal");
  trc->add_option("--model", model_path)->required();
  trc->add_option("--in", in_path)->required();
  trc->add_option("--engine-a", engine_a)->capture_default_str();
  trc->add_option("--engine-b", engine_b)->capture_default_str();
  trc->add_option("--out", out)->required();
  trc->callback([&] {
    action = [&] {
      const codec::Model m = codec::Model::load(model_path);
      const auto bs = codec::Bitstream::parse(codec::read_file(in_path));
      const auto rep = eval::trace_decode(m, bs, FloatEngine::parse(engine_a), FloatEngine::parse(engine_b));
      eval::write_text(out, rep.csv());
      if (rep.all_equal()) {
        std::printf("all signals equal\n");
      } else {
        const auto& r = rep.records[*rep.first_divergence];
        std::printf("first divergence: %s (%s) frame %zu index %lld\n", r.signal.c_str(), codec::subpath_name(r.subpath),
                    r.frame, r.first_div_index);
      }
    };
  });

  std::string baseline_csv, test_csv;
  auto* bd = app.add_subcommand("bdrate", "BD-rate of two rd csv files");
  bd->add_option("--baseline", baseline_csv)->required();
  bd->add_option("--test", test_csv)->required();
  bd->callback([&] {
    action = [&] {
      const auto a = eval::curve_of(eval::parse_rd_csv(eval::read_text(baseline_csv)));
      const auto b = eval::curve_of(eval::parse_rd_csv(eval::read_text(test_csv)));
      std::printf("%.2f%%\n", eval::bd_rate(a, b));
    };
  });

  auto* rd = app.add_subcommand("rd", "rate-distortion curve over clips");
  rd->add_option("--model", model_path)->required();
  rd->add_option("--clips", clip_args, "clips (default: the 4 held-out synthetic clips)");
  rd->add_option("--qualities", qualities, "default: 1..9");
  rd->add_option("--mode", mode, "float | quant")->capture_default_str();
  rd->add_option("--engine", engine)->capture_default_str();
  rd->add_flag("--mean-offset", mean_offset);
  rd->add_option("--out", out, "quality,bpp,psnr csv")->required();
  rd->callback([&] {
    action = [&] {
      if (qualities.empty()) qualities = {1, 2, 3, 4, 5, 6, 7, 8, 9};
      check_qualities(qualities);
      const codec::Model m = codec::Model::load(model_path);
      const auto clips = load_clip_args(clip_args, search::default_test_specs());
      codec::CodecOptions opt{codec::parse_hp_mode(mode), FloatEngine::parse(engine), mean_offset};
      const auto pts = search::evaluate_rd(m, clips, qualities, opt);
      const std::string csv = eval::rd_csv(pts);
      eval::write_text(out, csv);
      std::fputs(csv.c_str(), stdout);
    };
  });

  std::string clip_arg, svg_path;
  auto* sim = app.add_subcommand("simulate-mismatch",
                                 "per-frame PSNR of float / quant hyper decoders on same / different engines");
  sim->add_option("--model", model_path)->required();
  sim->add_option("--clip", clip_arg)->required();
  sim->add_option("--qualities", qualities, "default: 9");
  sim->add_option("--engine-a", engine_a, "encoder / same-side decoder engine")->capture_default_str();
  sim->add_option("--engine-b", engine_b, "\"different machine\" decoder engine")->capture_default_str();
  sim->add_option("--calib", clip_args, "calibration clips when the model has no integer decoder");
  cfg.add(sim);
  sim->add_option("--out", out, "series,quality,frame,psnr_db csv")->required();
  sim->add_option("--svg", svg_path, "PSNR-vs-frame chart");
  sim->callback([&] {
    action = [&] {
      if (qualities.empty()) qualities = {9};
      check_qualities(qualities);
      const FloatEngine ea = FloatEngine::parse(engine_a), eb = FloatEngine::parse(engine_b);
      codec::Model m = codec::Model::load(model_path);
      if (!m.quantized()) {
        m = calibrated(m, load_clip_args(clip_args, search::default_calibration_specs()), cfg.get(), ea, {});
      }
      const auto clip = load_clip_arg(clip_arg);
      std::string csv = "series,quality,frame,psnr_db\n";
      std::vector<eval::Series> series;
      for (int q : qualities) {
        for (codec::HpMode hp : {codec::HpMode::float_mode, codec::HpMode::quantized}) {
          const auto enc = codec::encode_sequence(m, clip, q, {hp, ea, false});
          for (bool diff : {false, true}) {
            const auto dec = codec::decode_sequence(m, enc.bitstream, diff ? eb : ea);
            const auto ps = eval::psnr_per_frame(clip, dec.frames);
            std::string name = std::string(hp == codec::HpMode::quantized ? "quant" : "float") + (diff ? "/diff" : "/same");
            eval::Series s{qualities.size() > 1 ? name + " q" + std::to_string(q) : name, {}};
            for (std::size_t f = 0; f < ps.size(); ++f) {
              csv += name + "," + std::to_string(q) + "," + std::to_string(f) + "," + eval::format_psnr(ps[f]) + "\n";
              s.points.emplace_back(static_cast<double>(f), ps[f]);
            }
            series.push_back(std::move(s));
          }
        }
      }
      eval::write_text(out, csv);
      if (!svg_path.empty()) {
        eval::write_text(svg_path, eval::svg_line_chart(series, "PSNR per frame", "frame", "PSNR [dB]"));
      }
      std::fputs(csv.c_str(), stdout);
    };
  });

  std::string ref_dir, test_dir;
  auto* ps = app.add_subcommand("psnr", "per-frame PSNR of two frame sequences");
  ps->add_option("--ref", ref_dir)->required();
  ps->add_option("--test", test_dir)->required();
  ps->add_option("--out", out, "frame,psnr_db csv (default: stdout)");
  ps->callback([&] {
    action = [&] {
      const auto a = io::load_frames(ref_dir);
      const auto b = io::load_frames(test_dir);
      const auto v = eval::psnr_per_frame(a, b);
      const std::string csv = eval::per_frame_csv(v);
      if (out.empty()) {
        std::fputs(csv.c_str(), stdout);
      } else {
        eval::write_text(out, csv);
      }
      const std::vector<std::vector<codec::Frame>> ra{a}, rb{b};
      std::printf("mean %s\n", eval::format_psnr(eval::mean_psnr(ra, rb)).c_str());
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (action) action();
  } catch (const UsageError& e) {
    std::fprintf(stderr, "sqv: %s\n", e.what());
    return kExitUsage;
  } catch (const Error& e) {
    std::fprintf(stderr, "sqv: %s\n", e.what());
    return kExitData;
  } catch (const fs::filesystem_error& e) {
    std::fprintf(stderr, "sqv: %s\n", e.what());
    return kExitData;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "sqv: internal error: %s\n", e.what());
    return kExitInternal;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) { return run(argc, argv); }
