#pragma once

#include <stdexcept>
#include <string>

namespace sqv {

enum class ErrorKind {
  shape,   // tensor extents disagree
  format,  // malformed or truncated file / stream
  config,  // invalid quantization or codec configuration
  range,   // value outside a representable range
  model,   // model / bitstream identity mismatch
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class ShapeError : public Error {
 public:
  // `axes` names the offending dimensions, e.g. "input.c vs weight.cin".
  ShapeError(std::string axes, const std::string& detail)
      : Error(ErrorKind::shape, "shape mismatch [" + axes + "]: " + detail), axes_(std::move(axes)) {}
  const std::string& axes() const noexcept { return axes_; }

 private:
  std::string axes_;
};

class FormatError : public Error {
 public:
  explicit FormatError(const std::string& what) : Error(ErrorKind::format, what) {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(ErrorKind::config, what) {}
};

class RangeError : public Error {
 public:
  explicit RangeError(const std::string& what) : Error(ErrorKind::range, what) {}
};

class ModelMismatchError : public Error {
 public:
  explicit ModelMismatchError(const std::string& what) : Error(ErrorKind::model, what) {}
};

}  // namespace sqv
