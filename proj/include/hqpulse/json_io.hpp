#pragma once

#include <array>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "hqpulse/evolve.hpp"
#include "hqpulse/hubbard.hpp"
#include "hqpulse/topology.hpp"
#include "hqpulse/version.hpp"

namespace hqpulse {

using nlohmann::json;

// Shortest decimal that round-trips the exact double.
inline std::string format_double(double x) {
  std::array<char, 40> buf;
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  return std::string(buf.data(), res.ptr);
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << content;
}

inline std::string fnv1a64_hex(const std::string& data) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  std::array<char, 17> buf{};
  for (int i = 15; i >= 0; --i) {
    buf[i] = "0123456789abcdef"[h & 0xf];
    h >>= 4;
  }
  return std::string(buf.data(), 16);
}

namespace detail {

class StrictObject {
 public:
  StrictObject(const json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j.is_object()) throw std::invalid_argument(where_ + ": expected a JSON object");
  }

  bool has(const std::string& key) {
    seen_.insert(key);
    return j_.contains(key);
  }

  const json& at(const std::string& key) {
    seen_.insert(key);
    if (!j_.contains(key))
      throw std::invalid_argument(where_ + ": missing required field '" + key + "'");
    return j_.at(key);
  }

  double number(const std::string& key, std::optional<double> fallback = std::nullopt) {
    seen_.insert(key);
    if (!j_.contains(key)) {
      if (fallback) return *fallback;
      throw std::invalid_argument(where_ + ": missing required field '" + key + "'");
    }
    const json& v = j_.at(key);
    if (!v.is_number())
      throw std::invalid_argument(where_ + ": field '" + key + "' must be a number");
    return v.get<double>();
  }

  // Rejects any field that was never requested.
  void finish() const {
    for (const auto& [key, value] : j_.items())
      if (!seen_.contains(key))
        throw std::invalid_argument(where_ + ": unknown field '" + key + "'");
  }

 private:
  const json& j_;
  std::string where_;
  std::set<std::string> seen_;
};

}  // namespace detail

// ---------------------------------------------------------------------------
// PulseSequence files
// ---------------------------------------------------------------------------

inline json to_json(const PulseSequence& seq) {
  json steps = json::array();
  for (const auto& s : seq.steps) {
    json step{{"tau", s.tau}};
    if (seq.topology == Topology::Single) {
      step["J13"] = s.couplings.a.j13;
      step["J23"] = s.couplings.a.j23;
    } else {
      step["J13_a"] = s.couplings.a.j13;
      step["J23_a"] = s.couplings.a.j23;
      step["J13_b"] = s.couplings.b.j13;
      step["J23_b"] = s.couplings.b.j23;
      if (seq.topology == Topology::ConfigA) {
        step["J_3a1b"] = s.couplings.inter[0];
        step["J_3a2b"] = s.couplings.inter[1];
      } else {
        step["J_1a1b"] = s.couplings.inter[0];
        step["J_2a2b"] = s.couplings.inter[1];
      }
    }
    steps.push_back(std::move(step));
  }
  return json{{"topology", to_string(seq.topology)},
              {"gate", seq.gate},
              {"j12_frozen", seq.j12_frozen},
              {"fidelity", seq.fidelity},
              {"seed", seq.seed},
              {"steps", std::move(steps)}};
}

inline PulseSequence sequence_from_json(const json& j) {
  detail::StrictObject obj(j, "pulse sequence");
  PulseSequence seq;
  seq.topology = topology_from_string(obj.at("topology").get<std::string>());
  seq.gate = obj.at("gate").get<std::string>();
  seq.j12_frozen = obj.number("j12_frozen");
  seq.fidelity = obj.number("fidelity", 0.0);
  seq.seed = obj.has("seed") ? obj.at("seed").get<std::uint64_t>() : 0;
  const json& steps = obj.at("steps");
  if (!steps.is_array() || steps.empty())
    throw std::invalid_argument("pulse sequence: 'steps' must be a nonempty array");
  int index = 0;
  for (const auto& sj : steps) {
    detail::StrictObject so(sj, "step " + std::to_string(index));
    PulseStep step;
    step.tau = so.number("tau");
    step.couplings.topology = seq.topology;
    if (seq.topology == Topology::Single) {
      step.couplings.a = {so.number("J13"), so.number("J23"), seq.j12_frozen};
    } else {
      step.couplings.a = {so.number("J13_a"), so.number("J23_a"), seq.j12_frozen};
      step.couplings.b = {so.number("J13_b"), so.number("J23_b"), seq.j12_frozen};
      if (seq.topology == Topology::ConfigA)
        step.couplings.inter = {so.number("J_3a1b"), so.number("J_3a2b")};
      else
        step.couplings.inter = {so.number("J_1a1b"), so.number("J_2a2b")};
    }
    so.finish();
    seq.steps.push_back(std::move(step));
    ++index;
  }
  obj.finish();
  seq.validate();
  return seq;
}

// ---------------------------------------------------------------------------
// Hubbard parameter files
// ---------------------------------------------------------------------------

struct HubbardFile {
  bool two_qubit = false;
  std::string unit;  // "ueV" | "meV" | "dimensionless"
  HubbardParams1Q one{};
  HubbardParams2Q two{};
};

namespace detail {

inline void check_unit(const std::string& unit) {
  if (unit != "ueV" && unit != "meV" && unit != "dimensionless")
    throw std::invalid_argument("hubbard file: unit must be ueV|meV|dimensionless");
}

inline std::array<double, 3> triple(const json& v, const std::string& name) {
  if (!v.is_array() || v.size() != 3)
    throw std::invalid_argument("hubbard file: '" + name + "' must be [x,y,z]");
  return {v[0].get<double>(), v[1].get<double>(), v[2].get<double>()};
}

inline HubbardParams1Q qubit_params(detail::StrictObject& obj, const std::string& sfx) {
  HubbardParams1Q p;
  p.eps = triple(obj.at("eps" + sfx), "eps" + sfx);
  p.t13 = obj.number("t13" + sfx, 0.0);
  p.t23 = obj.number("t23" + sfx, 0.0);
  p.U = obj.has("U" + sfx) ? triple(obj.at("U" + sfx), "U" + sfx)
                           : std::array<double, 3>{0.0, 0.0, 0.0};
  p.U12 = obj.number("U12" + sfx, 0.0);
  p.U13 = obj.number("U13" + sfx, 0.0);
  p.U23 = obj.number("U23" + sfx, 0.0);
  const auto pair = [&](const std::string& tag) {
    PairInteraction pi;
    pi.Je = obj.number("Je_" + tag + sfx, 0.0);
    pi.Jp = obj.number("Jp_" + tag + sfx, 0.0);
    pi.Jt = obj.number("Jt_" + tag + sfx, 0.0);
    return pi;
  };
  p.j13 = pair("13");
  p.j23 = pair("23");
  p.j12 = pair("12");
  return p;
}

inline PairInteraction inter_pair(detail::StrictObject& obj, const std::string& tag) {
  PairInteraction pi;
  pi.Je = obj.number("Je_" + tag, 0.0);
  pi.Jp = obj.number("Jp_" + tag, 0.0);
  pi.Jt = obj.number("Jt_" + tag, 0.0);
  return pi;
}

}  // namespace detail

inline HubbardFile hubbard_from_json(const json& j) {
  detail::StrictObject obj(j, "hubbard params");
  HubbardFile f;
  f.unit = obj.at("unit").get<std::string>();
  detail::check_unit(f.unit);
  if (obj.has("config")) {
    f.two_qubit = true;
    f.two.config = topology_from_string(obj.at("config").get<std::string>());
    if (f.two.config == Topology::Single)
      throw std::invalid_argument("hubbard file: config must be A or B");
    f.two.a = detail::qubit_params(obj, "_a");
    f.two.b = detail::qubit_params(obj, "_b");
    if (f.two.config == Topology::ConfigA) {
      f.two.t_3a1b = obj.number("t_3a1b", 0.0);
      f.two.t_3a2b = obj.number("t_3a2b", 0.0);
      f.two.U_3a1b = obj.number("U_3a1b", 0.0);
      f.two.U_3a2b = obj.number("U_3a2b", 0.0);
      f.two.j_3a1b = detail::inter_pair(obj, "3a1b");
      f.two.j_3a2b = detail::inter_pair(obj, "3a2b");
    } else {
      f.two.t_1a1b = obj.number("t_1a1b", 0.0);
      f.two.t_2a2b = obj.number("t_2a2b", 0.0);
      f.two.U_1a1b = obj.number("U_1a1b", 0.0);
      f.two.U_1a2b = obj.number("U_1a2b", 0.0);
      f.two.U_2a1b = obj.number("U_2a1b", 0.0);
      f.two.U_2a2b = obj.number("U_2a2b", 0.0);
      f.two.j_1a1b = detail::inter_pair(obj, "1a1b");
      f.two.j_2a2b = detail::inter_pair(obj, "2a2b");
    }
    f.two.validate();
  } else {
    f.one = detail::qubit_params(obj, "");
    f.one.validate();
  }
  obj.finish();
  return f;
}

// ---------------------------------------------------------------------------
// Custom gate files
// ---------------------------------------------------------------------------

inline GateTarget gate_from_json(const json& j) {
  detail::StrictObject obj(j, "gate file");
  GateTarget g;
  g.name = obj.at("name").get<std::string>();
  const json& rows = obj.at("matrix");
  if (!rows.is_array() || (rows.size() != 2 && rows.size() != 4))
    throw std::invalid_argument("gate file: matrix must have 2 or 4 rows");
  const int d = static_cast<int>(rows.size());
  g.matrix.resize(d, d);
  for (int r = 0; r < d; ++r) {
    const json& row = rows[r];
    if (!row.is_array() || static_cast<int>(row.size()) != d)
      throw std::invalid_argument("gate file: matrix rows must have matching length");
    for (int c = 0; c < d; ++c) {
      const json& e = row[c];
      if (!e.is_array() || e.size() != 2)
        throw std::invalid_argument("gate file: entries must be [re, im]");
      g.matrix(r, c) = std::complex<double>(e[0].get<double>(), e[1].get<double>());
    }
  }
  obj.finish();
  g.validate();
  return g;
}

// ---------------------------------------------------------------------------
// Run manifests
// ---------------------------------------------------------------------------

struct RunManifest {
  std::string command;
  json config = json::object();
  std::uint64_t seed = 0;
  std::map<std::string, std::string> input_hashes;
  double wall_ms = 0.0;
};

inline json to_json(const RunManifest& m) {
  json hashes = json::object();
  for (const auto& [path, hash] : m.input_hashes) hashes[path] = hash;
  return json{{"command", m.command},   {"config", m.config},
              {"seed", m.seed},         {"version", kVersion},
              {"input_hashes", hashes}, {"wall_ms", m.wall_ms}};
}

inline json to_json(const FidelityReport& r) {
  json out{{"fidelity", r.fidelity},
           {"leakage", r.leakage},
           {"total_tau", r.total_tau}};
  if (r.physical_time_ns) out["physical_time_ns"] = *r.physical_time_ns;
  return out;
}

}  // namespace hqpulse
