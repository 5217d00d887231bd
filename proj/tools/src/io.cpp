#include "io.hpp"

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>

namespace funcctl::cli {

namespace {

using nlohmann::json;

Matrix parse_matrix(const json& j, const std::string& name, const std::string& origin) {
  const auto where = origin + ": \"" + name + "\"";
  if (!j.is_array() || j.empty()) throw ParseError(where + " must be a nonempty array of rows");
  const std::size_t rows = j.size();
  std::size_t cols = 0;
  Matrix M;
  for (std::size_t i = 0; i < rows; ++i) {
    const auto& row = j[i];
    if (!row.is_array() || row.empty())
      throw ParseError(where + " row " + std::to_string(i) + " must be a nonempty array");
    if (i == 0) {
      cols = row.size();
      M.resize(static_cast<Index>(rows), static_cast<Index>(cols));
    } else if (row.size() != cols) {
      throw ParseError(where + " row " + std::to_string(i) + " has " +
                       std::to_string(row.size()) + " entries, expected " + std::to_string(cols));
    }
    for (std::size_t k = 0; k < cols; ++k) {
      if (!row[k].is_number())
        throw ParseError(where + " entry (" + std::to_string(i) + "," + std::to_string(k) +
                         ") is not a number");
      M(static_cast<Index>(i), static_cast<Index>(k)) = row[k].get<double>();
    }
  }
  if (!is_finite(M)) throw ParseError(where + " contains a non-finite entry");
  return M;
}

}  // namespace

SystemFile parse_system_file(const std::string& text, const std::string& origin) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(origin + ": " + e.what());
  }
  if (!j.is_object()) throw ParseError(origin + ": top level must be an object");
  for (const char* required : {"A", "B", "C", "F"})
    if (!j.contains(required)) throw ParseError(origin + ": missing member \"" + required + "\"");

  SystemFile file;
  file.sys.A = parse_matrix(j["A"], "A", origin);
  file.sys.B = parse_matrix(j["B"], "B", origin);
  file.sys.C = parse_matrix(j["C"], "C", origin);
  file.target.F = parse_matrix(j["F"], "F", origin);

  const Index n = file.sys.A.rows();
  if (file.sys.A.cols() != n) throw ParseError(origin + ": \"A\" must be square");
  auto check_cols = [&](const Matrix& M, const char* name) {
    if (M.cols() != n)
      throw ParseError(origin + ": \"" + name + "\" must have " + std::to_string(n) + " columns");
  };
  if (file.sys.B.rows() != n)
    throw ParseError(origin + ": \"B\" must have " + std::to_string(n) + " rows");
  check_cols(file.sys.C, "C");
  check_cols(file.target.F, "F");

  if (j.contains("R1")) {
    file.R1 = parse_matrix(j["R1"], "R1", origin);
    check_cols(*file.R1, "R1");
  }
  if (j.contains("R")) {
    file.R = parse_matrix(j["R"], "R", origin);
    check_cols(*file.R, "R");
  }
  if (j.contains("tolerances")) {
    const auto& t = j["tolerances"];
    if (!t.is_object()) throw ParseError(origin + ": \"tolerances\" must be an object");
    auto read = [&](const char* name, double& target_field) {
      if (!t.contains(name)) return;
      if (!t[name].is_number())
        throw ParseError(origin + ": tolerance \"" + name + "\" is not a number");
      target_field = t[name].get<double>();
    };
    read("relative_rank_tol", file.tol.relative_rank_tol);
    read("absolute_zero_tol", file.tol.absolute_zero_tol);
    read("eigen_match_tol", file.tol.eigen_match_tol);
    try {
      file.tol.validate();
    } catch (const std::invalid_argument& e) {
      throw ParseError(origin + ": " + e.what());
    }
  }
  return file;
}

SystemFile load_system_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open file");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_system_file(buffer.str(), path);
}

// ---------------------------------------------------------------------------
// JSON writer
// ---------------------------------------------------------------------------

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void JsonWriter::separate() {
  if (pending_key_) {
    pending_key_ = false;
    return;
  }
  if (!need_comma_.empty()) {
    if (need_comma_.back()) out_ += ',';
    need_comma_.back() = true;
  }
}

JsonWriter& JsonWriter::begin_object() {
  separate();
  out_ += '{';
  need_comma_.push_back(false);
  return *this;
}

JsonWriter& JsonWriter::end_object() {
  out_ += '}';
  need_comma_.pop_back();
  return *this;
}

JsonWriter& JsonWriter::begin_array() {
  separate();
  out_ += '[';
  need_comma_.push_back(false);
  return *this;
}

JsonWriter& JsonWriter::end_array() {
  out_ += ']';
  need_comma_.pop_back();
  return *this;
}

JsonWriter& JsonWriter::key(const std::string& k) {
  separate();
  out_ += '"';
  out_ += k;
  out_ += "\":";
  pending_key_ = true;
  return *this;
}

JsonWriter& JsonWriter::value(double v) {
  separate();
  out_ += format_double(v);
  return *this;
}

JsonWriter& JsonWriter::value(bool v) {
  separate();
  out_ += v ? "true" : "false";
  return *this;
}

JsonWriter& JsonWriter::value(long v) {
  separate();
  out_ += std::to_string(v);
  return *this;
}

JsonWriter& JsonWriter::value(const std::string& v) {
  separate();
  out_ += '"';
  for (char c : v) {
    switch (c) {
      case '"': out_ += "\\\""; break;
      case '\\': out_ += "\\\\"; break;
      case '\n': out_ += "\\n"; break;
      case '\t': out_ += "\\t"; break;
      default: out_ += c;
    }
  }
  out_ += '"';
  return *this;
}

JsonWriter& JsonWriter::matrix(const Matrix& M) {
  begin_array();
  for (Index i = 0; i < M.rows(); ++i) {
    begin_array();
    for (Index j = 0; j < M.cols(); ++j) value(M(i, j));
    end_array();
  }
  end_array();
  return *this;
}

JsonWriter& JsonWriter::spectrum(const ComplexSpectrum& s) {
  begin_array();
  for (const Complex& v : s.values) {
    begin_array();
    value(v.real());
    value(v.imag());
    end_array();
  }
  end_array();
  return *this;
}

// ---------------------------------------------------------------------------
// Pole and vector parsing
// ---------------------------------------------------------------------------

Complex parse_complex(const std::string& text) {
  std::string s;
  for (char c : text)
    if (!std::isspace(static_cast<unsigned char>(c))) s += c;
  if (s.empty()) throw ParseError("empty pole entry");

  auto to_double = [](const std::string& part) {
    if (part == "+" || part.empty()) return 1.0;
    if (part == "-") return -1.0;
    std::size_t used = 0;
    double v;
    try {
      v = std::stod(part, &used);
    } catch (const std::exception&) {
      throw ParseError("cannot parse number '" + part + "'");
    }
    if (used != part.size()) throw ParseError("cannot parse number '" + part + "'");
    return v;
  };

  if (s.back() != 'i' && s.back() != 'j') return Complex(to_double(s), 0.0);

  const std::string body = s.substr(0, s.size() - 1);
  // Split at the last sign that is not an exponent sign and not leading.
  std::size_t split = std::string::npos;
  for (std::size_t k = body.size(); k-- > 1;) {
    if ((body[k] == '+' || body[k] == '-') && body[k - 1] != 'e' && body[k - 1] != 'E') {
      split = k;
      break;
    }
  }
  if (split == std::string::npos) return Complex(0.0, to_double(body));
  return Complex(to_double(body.substr(0, split)), to_double(body.substr(split)));
}

ComplexSpectrum parse_pole_list(const std::string& text) {
  ComplexSpectrum out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.find_first_not_of(" \t") == std::string::npos) continue;
    out.values.push_back(parse_complex(item));
  }
  if (out.values.empty()) throw ParseError("empty pole list");
  return out;
}

Vector parse_vector(const std::string& text) {
  std::vector<double> vals;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.find_first_not_of(" \t") == std::string::npos) continue;
    const Complex c = parse_complex(item);
    if (c.imag() != 0.0) throw ParseError("vector entries must be real");
    vals.push_back(c.real());
  }
  if (vals.empty()) throw ParseError("empty vector");
  return Eigen::Map<Vector>(vals.data(), static_cast<Index>(vals.size()));
}

}  // namespace funcctl::cli
