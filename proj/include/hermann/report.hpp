#pragma once

// Report serialization and triad files.
//
// Reports are nlohmann::ordered_json trees; numbers are written by our own
// emitter with 17 significant digits so that output is byte-stable and
// round-trips exactly. CSV output flattens the tree to "path,value" rows.

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "hermann/triad.hpp"

namespace hermann::report {

using Json = nlohmann::ordered_json;

inline constexpr const char* kSchemaVersion = "1.0";

inline std::string format_number(double v) {
  if (!std::isfinite(v)) return "null";
  if (v == 0.0) return "0";  // also folds -0
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace detail {

inline void emit(const Json& j, std::ostringstream& os, int indent, int depth) {
  const std::string pad(static_cast<size_t>(indent * (depth + 1)), ' ');
  const std::string end_pad(static_cast<size_t>(indent * depth), ' ');
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        os << "{}";
        return;
      }
      os << "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) os << ",\n";
        first = false;
        os << pad << Json(it.key()).dump() << ": ";
        emit(it.value(), os, indent, depth + 1);
      }
      os << "\n" << end_pad << "}";
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        os << "[]";
        return;
      }
      // Arrays of scalars stay on one line.
      bool scalars = true;
      for (const auto& v : j)
        if (v.is_structured()) scalars = false;
      if (scalars) {
        os << "[";
        for (size_t i = 0; i < j.size(); ++i) {
          if (i) os << ", ";
          emit(j[i], os, indent, depth + 1);
        }
        os << "]";
        return;
      }
      os << "[\n";
      for (size_t i = 0; i < j.size(); ++i) {
        if (i) os << ",\n";
        os << pad;
        emit(j[i], os, indent, depth + 1);
      }
      os << "\n" << end_pad << "]";
      return;
    }
    case Json::value_t::number_float:
      os << format_number(j.get<double>());
      return;
    default:
      os << j.dump();
  }
}

inline void flatten(const Json& j, const std::string& path, std::vector<std::pair<std::string, std::string>>& rows) {
  if (j.is_object()) {
    for (auto it = j.begin(); it != j.end(); ++it) flatten(it.value(), path.empty() ? it.key() : path + "." + it.key(), rows);
  } else if (j.is_array()) {
    for (size_t i = 0; i < j.size(); ++i) flatten(j[i], path + "[" + std::to_string(i) + "]", rows);
  } else if (j.is_number_float()) {
    rows.emplace_back(path, format_number(j.get<double>()));
  } else if (j.is_string()) {
    rows.emplace_back(path, j.get<std::string>());
  } else {
    rows.emplace_back(path, j.dump());
  }
}

inline std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace detail

inline std::string to_json_string(const Json& j, int indent = 2) {
  std::ostringstream os;
  detail::emit(j, os, indent, 0);
  os << "\n";
  return os.str();
}

inline std::string to_csv_string(const Json& j) {
  std::vector<std::pair<std::string, std::string>> rows;
  detail::flatten(j, "", rows);
  std::ostringstream os;
  os << "key,value\n";
  for (const auto& [k, v] : rows) os << detail::csv_escape(k) << "," << detail::csv_escape(v) << "\n";
  return os.str();
}

inline Json vec_json(const Vec& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

inline Json vec_json(const std::vector<double>& v) {
  Json a = Json::array();
  for (double x : v) a.push_back(x);
  return a;
}

inline Json mat_json(const Mat& m) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    a.push_back(row);
  }
  return a;
}

// ---------------------------------------------------------------------------
// Triad files: {"n", "sigma1_conjugator", "sigma2_conjugator",
// optional "name", "t_frame", "tprime_frame"}.

namespace detail {

inline Mat parse_matrix(const Json& j, int n, const std::string& what) {
  if (!j.is_array() || static_cast<int>(j.size()) != n) throw TriadFormatError(what + ": expected " + std::to_string(n) + " rows");
  Mat m(n, n);
  for (int i = 0; i < n; ++i) {
    const Json& row = j[static_cast<size_t>(i)];
    if (!row.is_array() || static_cast<int>(row.size()) != n)
      throw TriadFormatError(what + ": row " + std::to_string(i) + " must have " + std::to_string(n) + " entries");
    for (int k = 0; k < n; ++k) {
      if (!row[static_cast<size_t>(k)].is_number()) throw TriadFormatError(what + ": non-numeric entry");
      m(i, k) = row[static_cast<size_t>(k)].get<double>();
    }
  }
  return m;
}

inline std::vector<Mat> parse_frame(const Json& j, int n, const std::string& what) {
  if (!j.is_array()) throw TriadFormatError(what + ": expected a list of matrices");
  std::vector<Mat> out;
  for (size_t i = 0; i < j.size(); ++i) out.push_back(parse_matrix(j[i], n, what + "[" + std::to_string(i) + "]"));
  return out;
}

}  // namespace detail

inline TriadSpec triad_from_json(const Json& j) {
  if (!j.is_object()) throw TriadFormatError("triad file: top level must be an object");
  if (!j.contains("n") || !j["n"].is_number_integer()) throw TriadFormatError("triad file: missing integer 'n'");
  const int n = j["n"].get<int>();
  if (n < 3) throw TriadFormatError("triad file: n must be at least 3");
  for (const char* key : {"sigma1_conjugator", "sigma2_conjugator"})
    if (!j.contains(key)) throw TriadFormatError(std::string("triad file: missing '") + key + "'");
  TriadSpec s;
  s.name = j.value("name", std::string("user"));
  s.n = n;
  s.sigma1 = detail::parse_matrix(j["sigma1_conjugator"], n, "sigma1_conjugator");
  s.sigma2 = detail::parse_matrix(j["sigma2_conjugator"], n, "sigma2_conjugator");
  for (const auto& [name, c] : {std::pair{"sigma1_conjugator", &s.sigma1}, std::pair{"sigma2_conjugator", &s.sigma2}}) {
    if ((*c * c->transpose() - Mat::Identity(n, n)).norm() > 1e-9)
      throw TriadFormatError(std::string("triad file: ") + name + " is not orthogonal");
    const Mat sq = *c * *c;
    if ((sq - Mat::Identity(n, n)).norm() > 1e-9 && (sq + Mat::Identity(n, n)).norm() > 1e-9)
      throw TriadFormatError(std::string("triad file: ") + name + " does not square to +-I (conjugation is not an involution)");
  }
  s.commuting_expected = j.value("commuting", false);
  if (j.contains("t_frame")) s.t_frame = detail::parse_frame(j["t_frame"], n, "t_frame");
  if (j.contains("tprime_frame")) s.tprime_frame = detail::parse_frame(j["tprime_frame"], n, "tprime_frame");
  return s;
}

inline TriadSpec load_triad_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open triad file '" + path + "'");
  Json j;
  try {
    j = Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw TriadFormatError(std::string("triad file: ") + e.what());
  }
  return triad_from_json(j);
}

inline Json triad_to_json(const TriadSpec& s) {
  Json j;
  j["name"] = s.name;
  j["n"] = s.n;
  j["commuting"] = s.commuting_expected;
  j["sigma1_conjugator"] = mat_json(s.sigma1);
  j["sigma2_conjugator"] = mat_json(s.sigma2);
  if (!s.t_frame.empty()) {
    Json f = Json::array();
    for (const auto& m : s.t_frame) f.push_back(mat_json(m));
    j["t_frame"] = f;
  }
  if (!s.tprime_frame.empty()) {
    Json f = Json::array();
    for (const auto& m : s.tprime_frame) f.push_back(mat_json(m));
    j["tprime_frame"] = f;
  }
  return j;
}

}  // namespace hermann::report
