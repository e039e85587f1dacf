#pragma once

// Curve-spec files (JSON).
//
//   {
//     "kind": "segment",            // segment | circle_arc | helix | fourier | spline
//     "dimension": 3,
//     "closed": false,              // optional; only read for splines
//     "params": { "start": [-0.5, 0, 0], "end": [0.5, 0, 0] },
//     "window": { "center": [0, 0, 0], "radius": 2 }   // optional
//   }
//
// Parameter values are numbers or flat arrays of numbers; multi-point
// parameters (spline nodes, Fourier coefficient vectors) are flattened point
// by point. Unknown keys are rejected so that typos do not pass silently.

#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "fraclen/curve.hpp"
#include "fraclen/errors.hpp"

namespace fraclen {

struct WindowSpec {
  std::vector<double> center;
  double radius = 0.0;
};

struct CurveFile {
  CurveSpec spec;
  std::optional<WindowSpec> window;
  std::string canonical;  // re-serialized document, key order fixed
  std::uint64_t digest = 0;
};

/// FNV-1a, 64 bit.
inline std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  static constexpr char digits[] = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = digits[v & 0xfU];
    v >>= 4;
  }
  return out;
}

namespace detail {

using nlohmann::json;

inline std::vector<double> number_list(const json& v, const std::string& key) {
  if (v.is_number()) return {v.get<double>()};
  if (!v.is_array()) throw CurveSpecError("'" + key + "' must be a number or an array of numbers");
  std::vector<double> out;
  out.reserve(v.size());
  for (const json& x : v) {
    if (!x.is_number()) throw CurveSpecError("'" + key + "' must contain only numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

inline void reject_unknown(const json& obj, std::initializer_list<const char*> allowed, const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || it.key() == a;
    if (!ok) throw CurveSpecError("unknown key '" + it.key() + "' in " + where);
  }
}

}  // namespace detail

inline CurveFile parse_curve_spec(const std::string& text) {
  using detail::json;
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw CurveSpecError(std::string("curve spec is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw CurveSpecError("curve spec must be a JSON object");
  detail::reject_unknown(doc, {"kind", "dimension", "closed", "params", "window"}, "curve spec");
  if (!doc.contains("kind") || !doc["kind"].is_string()) throw CurveSpecError("curve spec needs a string 'kind'");
  if (!doc.contains("dimension") || !doc["dimension"].is_number_integer()) {
    throw CurveSpecError("curve spec needs an integer 'dimension'");
  }
  CurveFile out;
  try {
    out.spec.kind = curve_kind_from_string(doc["kind"].get<std::string>());
  } catch (const Error& e) {
    throw CurveSpecError(e.what());
  }
  out.spec.dimension = doc["dimension"].get<int>();
  if (doc.contains("closed")) {
    if (!doc["closed"].is_boolean()) throw CurveSpecError("'closed' must be a boolean");
    out.spec.closed = doc["closed"].get<bool>();
  }
  if (doc.contains("params")) {
    if (!doc["params"].is_object()) throw CurveSpecError("'params' must be an object");
    for (auto it = doc["params"].begin(); it != doc["params"].end(); ++it) {
      out.spec.params[it.key()] = detail::number_list(it.value(), it.key());
    }
  }
  if (doc.contains("window")) {
    const json& w = doc["window"];
    if (!w.is_object()) throw CurveSpecError("'window' must be an object");
    detail::reject_unknown(w, {"center", "radius"}, "window");
    if (!w.contains("radius") || !w["radius"].is_number()) throw CurveSpecError("window needs a numeric 'radius'");
    WindowSpec ws;
    ws.radius = w["radius"].get<double>();
    ws.center = w.contains("center") ? detail::number_list(w["center"], "window.center")
                                     : std::vector<double>(static_cast<std::size_t>(out.spec.dimension), 0.0);
    if (static_cast<int>(ws.center.size()) != out.spec.dimension) {
      throw CurveSpecError("window center has the wrong dimension");
    }
    out.window = ws;
  }
  out.canonical = doc.dump();
  out.digest = fnv1a(out.canonical);
  return out;
}

inline CurveFile load_curve_spec(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CurveSpecError("cannot open curve spec '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_curve_spec(ss.str());
}

}  // namespace fraclen
