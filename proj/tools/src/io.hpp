#pragma once

#include "funcctl/criteria.hpp"
#include "funcctl/types.hpp"

#include <optional>
#include <string>

namespace funcctl::cli {

/// Parsed system description file.
struct SystemFile {
  criteria::SystemTriple sys;
  criteria::FunctionalTarget target;
  std::optional<Matrix> R1;
  std::optional<Matrix> R;
  TolerancePolicy tol;
};

/// Load and validate a JSON system file: members "A", "B", "C", "F"
/// (row-major arrays of arrays), optional "R1", "R" and "tolerances".
/// Throws ParseError with file coordinates on malformed input.
SystemFile load_system_file(const std::string& path);
SystemFile parse_system_file(const std::string& text, const std::string& origin);

/// Streaming JSON writer used for reports. Numbers are printed with 17
/// significant digits so 64-bit floats round-trip exactly; key order is the
/// insertion order, which keeps report files deterministic.
class JsonWriter {
 public:
  JsonWriter& begin_object();
  JsonWriter& end_object();
  JsonWriter& begin_array();
  JsonWriter& end_array();
  JsonWriter& key(const std::string& k);
  JsonWriter& value(double v);
  JsonWriter& value(bool v);
  JsonWriter& value(long v);
  JsonWriter& value(const std::string& v);
  JsonWriter& value(const char* v) { return value(std::string(v)); }
  JsonWriter& matrix(const Matrix& M);
  JsonWriter& spectrum(const ComplexSpectrum& s);

  const std::string& str() const { return out_; }

 private:
  void separate();
  std::string out_;
  std::vector<bool> need_comma_;
  bool pending_key_ = false;
};

/// Parse one pole in the forms "a", "a+bi", "a-bi", "bi".
Complex parse_complex(const std::string& text);

/// Comma-separated pole list.
ComplexSpectrum parse_pole_list(const std::string& text);

/// Comma-separated real vector.
Vector parse_vector(const std::string& text);

std::string format_double(double v);

}  // namespace funcctl::cli
