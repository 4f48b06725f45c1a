#pragma once

#include <stdexcept>
#include <string>

namespace sostrat {

/// Structured failure kinds surfaced by the reduction pipeline. Each maps to
/// a hypothesis of the classification (degeneracy shape, stratification
/// pattern, ellipticity of the last layer) or to a limitation of working in
/// the coordinates given.
enum class FailKind {
  NoCommonFactor,         // xi'-block entries are coprime in x1
  NonGraphFactor,         // common factor is not a power of x1 - g(x2,x3)
  InfiniteOrder,          // xi'-block vanishes identically
  A4Violated,             // required stratum empty/missing at the base point
  NeedsCoordinateChange,  // zero set not recognizable in the given coordinates
  LastLayerNotElliptic,   // terminal bracket layer degenerates at the base point
  NotTypeI0,              // basis matrix not invertible at the origin
  NotStandardForm,        // input not reducible to a Theorem-form triple
  IllegalMove,            // estimate-simulator move precondition violated
  Unsupported,            // e.g. codirection off the xi3 axis
};

inline const char* fail_kind_name(FailKind k) {
  switch (k) {
    case FailKind::NoCommonFactor: return "NoCommonFactor";
    case FailKind::NonGraphFactor: return "NonGraphFactor";
    case FailKind::InfiniteOrder: return "InfiniteOrder";
    case FailKind::A4Violated: return "A4Violated";
    case FailKind::NeedsCoordinateChange: return "NeedsCoordinateChange";
    case FailKind::LastLayerNotElliptic: return "LastLayerNotElliptic";
    case FailKind::NotTypeI0: return "NotTypeI0";
    case FailKind::NotStandardForm: return "NotStandardForm";
    case FailKind::IllegalMove: return "IllegalMove";
    case FailKind::Unsupported: return "Unsupported";
  }
  return "?";
}

class pipeline_error : public std::runtime_error {
 public:
  pipeline_error(FailKind kind, const std::string& what)
      : std::runtime_error(std::string(fail_kind_name(kind)) + ": " + what), kind_(kind) {}
  FailKind kind() const { return kind_; }

 private:
  FailKind kind_;
};

class parse_error : public std::runtime_error {
 public:
  parse_error(int line, int col, const std::string& message, const std::string& expected = "")
      : std::runtime_error("parse error at " + std::to_string(line) + ":" + std::to_string(col) +
                           ": " + message + (expected.empty() ? "" : " (expected " + expected + ")")),
        line_(line),
        col_(col),
        expected_(expected) {}
  int line() const { return line_; }
  int col() const { return col_; }
  const std::string& expected() const { return expected_; }

 private:
  int line_, col_;
  std::string expected_;
};

}  // namespace sostrat
