#include <doctest.h>

#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

#include "helpers.hpp"
#include "sqv/codec/bitstream.hpp"
#include "sqv/codec/haar.hpp"
#include "sqv/codec/model.hpp"
#include "sqv/codec/sequence.hpp"
#include "sqv/common/error.hpp"
#include "sqv/common/rng.hpp"
#include "sqv/eval/metrics.hpp"
#include "sqv/quant/calibrate.hpp"
#include "sqv/search/clips.hpp"

using namespace sqv;
using namespace sqv::codec;

namespace {

search::Clip clip(search::MotionKind kind, std::uint64_t seed, int size, int frames) {
  search::ClipSpec s;
  s.kind = kind;
  s.seed = seed;
  s.width = s.height = size;
  s.frames = frames;
  return search::gen_synthetic_clip(s);
}

Frame random_frame(int w, int h, std::uint64_t seed) {
  Rng r(seed);
  Frame f(w, h);
  for (auto& v : f.samples) v = static_cast<std::uint8_t>(r.below(256));
  return f;
}

const Model& plain_model() {
  static const Model m = Model::create(1);
  return m;
}

// Calibrated once on small clips; the config is the first valid one.
const Model& quant_model() {
  static const Model m = [] {
    Model q = Model::create(1);
    std::vector<search::Clip> clips;
    for (int i = 0; i < 2; ++i) clips.push_back(clip(search::MotionKind::noise, 700 + i, 32, 3));
    const std::vector<int> qualities = {9};
    quant::QConfig qc;
    for (const auto& c : quant::enumerate_configs()) {
      if (quant::validate_config(c).ok) {
        qc = c;
        break;
      }
    }
    q.set_quantized(quant::calibrate_and_convert(q, clips, qc, FloatEngine::reference(), qualities));
    return q;
  }();
  return m;
}

double sum_sq(const Tensor& t) {
  double s = 0.0;
  for (float v : t.data()) s += static_cast<double>(v) * v;
  return s;
}

const CodecOptions kFloat{HpMode::float_mode, FloatEngine::reference(), false};
const CodecOptions kQuant{HpMode::quantized, FloatEngine::reference(), false};

}  // namespace

// ------------------------------------------------------------------ haar

TEST_CASE("constant mid-grey frame has only a DC latent") {
  const Tensor y = main_analysis(Frame(32, 32, 128));
  for (float v : y.data()) CHECK(v == 0.0f);
  const Tensor y2 = main_analysis(Frame(32, 32, 200));
  const std::size_t plane = y2.shape().h * y2.shape().w;
  for (std::size_t i = 0; i < y2.numel(); ++i) {
    if (i < plane) CHECK(y2.data()[i] != 0.0f);
    else CHECK(y2.data()[i] == 0.0f);
  }
}

TEST_CASE("haar synthesis inverts analysis") {
  for (std::uint64_t s = 0; s < 10; ++s) {
    const Frame f = random_frame(48, 32, 40 + s);
    const Tensor x = frame_to_tensor(f);
    const Tensor back = haar_synthesis(haar_analysis(x));
    REQUIRE(back.shape() == x.shape());
    double mx = 0.0;
    for (std::size_t i = 0; i < x.numel(); ++i) mx = std::max(mx, std::abs(static_cast<double>(back.data()[i]) - x.data()[i]));
    CHECK(mx * 128.0 <= 1e-3);
    const Frame r = main_synthesis(main_analysis(f), f.width, f.height);
    CHECK(eval::psnr(f, r) >= 80.0);
  }
}

TEST_CASE("haar preserves energy") {
  for (std::uint64_t s = 0; s < 10; ++s) {
    const Frame f = random_frame(32, 32, 60 + s);
    const Tensor x = frame_to_tensor(f);
    const double ratio = sum_sq(haar_analysis(x)) / sum_sq(x);
    CHECK(ratio >= 0.999);
    CHECK(ratio <= 1.001);
  }
}

TEST_CASE("frame dims must be multiples of 16") {
  CHECK_THROWS_AS(check_frame_dims(24, 32), ShapeError);
  CHECK_THROWS_AS(check_frame_dims(0, 32), ShapeError);
  CHECK_NOTHROW(check_frame_dims(16, 48));
  const std::vector<Frame> bad = {Frame(24, 24, 0)};
  CHECK_THROWS_AS(encode_sequence(plain_model(), bad, 5, kFloat), ShapeError);
  const std::vector<Frame> mixed = {Frame(16, 16, 0), Frame(32, 16, 0)};
  CHECK_THROWS_AS(encode_sequence(plain_model(), mixed, 5, kFloat), ShapeError);
}

TEST_CASE("quality table") {
  CHECK(quality_gain(1) == 0.25f);
  CHECK(quality_gain(9) == 64.0f);
  for (int q = 2; q <= 9; ++q) CHECK(quality_gain(q) > quality_gain(q - 1));
  CHECK_THROWS_AS(quality_gain(0), ConfigError);
  CHECK_THROWS_AS(quality_gain(10), ConfigError);
}

// -------------------------------------------------------------- sequence

TEST_CASE("constant frame at quality 5 survives coding") {
  // At gain 4 the DC step is 8 grey levels, so levels on that grid come back
  // exactly; off-grid levels lose up to half a step.
  for (int level : {128, 88, 200}) {
    const std::vector<Frame> frames = {Frame(32, 32, static_cast<std::uint8_t>(level))};
    const auto enc = encode_sequence(plain_model(), frames, 5, kFloat);
    const auto dec = decode_sequence(plain_model(), Bitstream::parse(enc.bitstream.serialize()), FloatEngine::reference());
    REQUIRE(dec.frames.size() == 1);
    CHECK(eval::psnr(frames[0], dec.frames[0]) >= 50.0);
  }
  const std::vector<Frame> off = {Frame(32, 32, 90)};
  const auto dec = encode_sequence(plain_model(), off, 5, kFloat).recon;
  CHECK(eval::psnr(off[0], dec[0]) >= 10.0 * std::log10(255.0 * 255.0 / 16.0));
}

TEST_CASE("encoding is deterministic") {
  const auto c = clip(search::MotionKind::noise, 5, 32, 3);
  for (const auto& opt : {kFloat, kQuant}) {
    const Model& m = opt.mode == HpMode::quantized ? quant_model() : plain_model();
    CHECK(encode_sequence(m, c, 7, opt).bitstream.serialize() == encode_sequence(m, c, 7, opt).bitstream.serialize());
  }
}

TEST_CASE("rate grows with quality") {
  const auto c = clip(search::MotionKind::noise, 6, 32, 3);
  double prev = 0.0;
  std::vector<double> psnr1;
  for (int q = 1; q <= 9; ++q) {
    const auto enc = encode_sequence(plain_model(), c, q, kFloat);
    const double b = eval::bpp(enc.bitstream);
    CHECK(b > prev);
    prev = b;
    const auto p = eval::psnr_per_frame(c, enc.recon);
    if (q == 1) psnr1 = p;
    if (q == 9) {
      for (std::size_t i = 0; i < p.size(); ++i) CHECK(p[i] >= psnr1[i]);
    }
  }
}

TEST_CASE("decoder reproduces the encoder's loop") {
  for (std::uint64_t s = 0; s < 3; ++s) {
    const auto c = clip(s == 0 ? search::MotionKind::pan : search::MotionKind::noise, 10 + s, 32, 4);
    for (auto opt : {kFloat, kQuant}) {
      for (bool mo : {false, true}) {
        opt.mean_offset = mo;
        const Model& m = opt.mode == HpMode::quantized ? quant_model() : plain_model();
        const auto enc = encode_sequence(m, c, 3 + static_cast<int>(s) * 3, opt);
        CHECK(enc.bitstream.mean_offset() == mo);
        CHECK(enc.bitstream.quantized() == (opt.mode == HpMode::quantized));
        const auto dec = decode_sequence(m, enc.bitstream, FloatEngine::reference());
        CHECK(dec.frames == enc.recon);
      }
    }
  }
}

TEST_CASE("static clip: inter frames cost less than the intra frame") {
  const auto c = clip(search::MotionKind::static_scene, 3, 32, 4);
  const auto enc = encode_sequence(plain_model(), c, 5, kFloat);
  REQUIRE(enc.bitstream.frames.size() == 4);
  CHECK(enc.bitstream.frames[0].type == FrameType::intra);
  const auto intra = enc.bitstream.frames[0].z.size() + enc.bitstream.frames[0].y.size();
  for (std::size_t t = 1; t < 4; ++t) {
    CHECK(enc.bitstream.frames[t].type == FrameType::inter);
    CHECK(enc.bitstream.frames[t].z.size() + enc.bitstream.frames[t].y.size() < intra);
  }
  const Frame& prev = enc.recon[0];
  CHECK(&predictor(prev) == &prev);
}

TEST_CASE("quantized mode requires a quantized decoder") {
  const auto c = clip(search::MotionKind::noise, 1, 16, 1);
  CHECK_THROWS_AS(encode_sequence(plain_model(), c, 5, kQuant), ConfigError);
  const auto enc = encode_sequence(quant_model(), c, 5, kQuant);
  // Different model id as well, so the mismatch check fires first.
  CHECK_THROWS_AS(decode_sequence(plain_model(), enc.bitstream, FloatEngine::reference()), ModelMismatchError);
}

// ---------------------------------------------------------- cross-engine

TEST_CASE("float mode: mismatched engines desynchronize and never recover") {
  const Model& m = plain_model();
  int severe = 0;
  for (std::uint64_t s = 0; s < 5; ++s) {
    const auto c = clip(search::MotionKind::noise, 1000 + s, 64, 8);
    const auto enc = encode_sequence(m, c, 9, kFloat);
    const auto same = decode_sequence(m, enc.bitstream, FloatEngine::reference());
    const auto diff = decode_sequence(m, enc.bitstream, FloatEngine::ulp(7), true);
    const auto ps = eval::psnr_per_frame(c, same.frames);
    const auto pd = eval::psnr_per_frame(c, diff.frames);
    bool below = false;
    for (std::size_t t = 0; t < ps.size(); ++t) {
      const bool now = pd[t] < ps[t] - 3.0;
      if (below) CHECK(now);
      below |= now;
    }
    CHECK(below);
    if (pd[4] <= ps[4] - 10.0) ++severe;
    // The hyper-latents come from static tables and stay intact.
    const auto sig_same = decode_sequence(m, enc.bitstream, FloatEngine::reference(), true).signals;
    for (std::size_t t = 0; t < diff.signals.size(); ++t) CHECK(diff.signals[t].z_hat == sig_same[t].z_hat);
  }
  CHECK(severe == 5);
}

TEST_CASE("float mode: a different engine changes some entropy parameter") {
  const auto c = clip(search::MotionKind::noise, 1000, 64, 1);
  const auto enc = encode_sequence(plain_model(), c, 9, kFloat, true);
  const TensorI32& z = enc.signals[0].z_hat;
  const auto a = hyper_decode(plain_model(), SubPath::intra, z, HpMode::float_mode, FloatEngine::reference());
  const auto a2 = hyper_decode(plain_model(), SubPath::intra, z, HpMode::float_mode, FloatEngine::reference());
  const auto b = hyper_decode(plain_model(), SubPath::intra, z, HpMode::float_mode, FloatEngine::ulp(7));
  CHECK(a == a2);
  CHECK((a.mu_shift != b.mu_shift || a.sigma_idx != b.sigma_idx));
}

TEST_CASE("quantized mode is engine independent end to end") {
  const Model& m = quant_model();
  const FloatEngine engines[] = {FloatEngine::reference(), FloatEngine::reassoc(), FloatEngine::fma(),
                                 FloatEngine::ulp(7), FloatEngine::host()};
  for (std::uint64_t s = 0; s < 3; ++s) {
    const auto c = clip(search::MotionKind::noise, 1000 + s, 32, 5);
    const auto enc = encode_sequence(m, c, 9, kQuant);
    const auto base = decode_sequence(m, enc.bitstream, FloatEngine::reference(), true);
    CHECK(base.frames == enc.recon);
    for (const auto& e : engines) {
      const auto enc_e = encode_sequence(m, c, 9, {HpMode::quantized, e, false});
      CHECK(enc_e.bitstream == enc.bitstream);
      const auto d = decode_sequence(m, enc.bitstream, e, true);
      for (std::size_t t = 0; t < d.signals.size(); ++t) {
        CHECK(d.signals[t].z_hat == base.signals[t].z_hat);
        CHECK(d.signals[t].params == base.signals[t].params);
        CHECK(d.signals[t].y_hat == base.signals[t].y_hat);
      }
      const auto pa = eval::psnr_per_frame(c, base.frames);
      const auto pb = eval::psnr_per_frame(c, d.frames);
      for (std::size_t t = 0; t < pa.size(); ++t) CHECK(std::abs(pa[t] - pb[t]) <= 0.01);
    }
  }
}

// ---------------------------------------------------------------- formats

TEST_CASE("bitstream round trip and truncation") {
  const auto c = clip(search::MotionKind::pan, 4, 16, 3);
  const auto enc = encode_sequence(plain_model(), c, 4, kFloat);
  const auto bytes = enc.bitstream.serialize();
  CHECK(bytes.size() == enc.bitstream.byte_size());
  const Bitstream back = Bitstream::parse(bytes);
  CHECK(back == enc.bitstream);
  CHECK(back.serialize() == bytes);
  for (std::size_t cut : {std::size_t{0}, std::size_t{3}, kHeaderBytes - 1, kHeaderBytes + 2, bytes.size() - 1}) {
    const std::vector<std::uint8_t> t(bytes.begin(), bytes.begin() + static_cast<long>(cut));
    CHECK_THROWS_AS(Bitstream::parse(t), FormatError);
  }
  auto trailing = bytes;
  trailing.push_back(0);
  CHECK_THROWS_AS(Bitstream::parse(trailing), FormatError);
  auto magic = bytes;
  magic[0] = 'X';
  CHECK_THROWS_AS(Bitstream::parse(magic), FormatError);
}

TEST_CASE("model serialization and id") {
  const Model& m = plain_model();
  const auto bytes = m.serialize();
  const Model back = Model::parse(bytes);
  CHECK(back.model_id() == m.model_id());
  CHECK(back.serialize() == bytes);
  CHECK(Model::create(1).model_id() == m.model_id());
  CHECK(Model::create(2).model_id() != m.model_id());
  const Model& q = quant_model();
  CHECK(q.model_id() != m.model_id());
  const Model qb = Model::parse(q.serialize());
  CHECK(qb.quantized());
  CHECK(qb.quant() == q.quant());
  CHECK(qb.model_id() == q.model_id());
  auto cut = bytes;
  cut.pop_back();
  CHECK_THROWS_AS(Model::parse(cut), FormatError);
}

TEST_CASE("decoding with another model is refused") {
  const auto c = clip(search::MotionKind::noise, 8, 16, 2);
  const auto enc = encode_sequence(plain_model(), c, 5, kFloat);
  const Model other = Model::create(99);
  CHECK_THROWS_AS(decode_sequence(other, enc.bitstream, FloatEngine::reference()), ModelMismatchError);
}

TEST_CASE("golden bitstream") {
  const auto c = clip(search::MotionKind::pan, 0x5eed, 16, 3);
  const auto bytes = encode_sequence(plain_model(), c, 6, kFloat).bitstream.serialize();
  const auto path = sqvtest::vectors_dir() / "bitstream_pan16_q6.hex";
  if (sqvtest::write_golden()) std::ofstream(path) << sqvtest::to_hex(bytes);
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  const auto golden = sqvtest::from_hex(ss.str());
  REQUIRE_FALSE(golden.empty());
  CHECK(bytes == golden);
  const auto dec = decode_sequence(plain_model(), Bitstream::parse(golden), FloatEngine::reference());
  CHECK(dec.frames.size() == 3);
}

TEST_CASE("small clip round trip stays fast") {
  const Model& qm = quant_model();
  const auto t0 = std::chrono::steady_clock::now();
  const auto c = clip(search::MotionKind::noise, 77, 16, 4);
  for (int q = 1; q <= 9; ++q) {
    for (const auto& opt : {kFloat, kQuant}) {
      const Model& m = opt.mode == HpMode::quantized ? qm : plain_model();
      const auto enc = encode_sequence(m, c, q, opt);
      const auto dec = decode_sequence(m, Bitstream::parse(enc.bitstream.serialize()), FloatEngine::reference());
      CHECK(dec.frames == enc.recon);
      for (double p : eval::psnr_per_frame(c, dec.frames)) CHECK(p > 10.0);
    }
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  CHECK(secs < 5.0);
}
