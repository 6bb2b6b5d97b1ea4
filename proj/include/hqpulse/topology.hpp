#pragma once

#include <stdexcept>
#include <string>

namespace hqpulse {

// Coupling geometry: one hybrid qubit, or two of them joined either through
// spin 3 of qubit a (ConfigA) or through like-indexed spins (ConfigB).
enum class Topology { Single, ConfigA, ConfigB };

inline int n_spins(Topology t) { return t == Topology::Single ? 3 : 6; }

inline int logical_dim(Topology t) { return t == Topology::Single ? 2 : 4; }

inline std::string to_string(Topology t) {
  switch (t) {
    case Topology::Single: return "single";
    case Topology::ConfigA: return "A";
    case Topology::ConfigB: return "B";
  }
  throw std::logic_error("bad topology");
}

inline Topology topology_from_string(const std::string& s) {
  if (s == "single") return Topology::Single;
  if (s == "A" || s == "a") return Topology::ConfigA;
  if (s == "B" || s == "b") return Topology::ConfigB;
  throw std::invalid_argument("unknown topology '" + s + "' (expected single|A|B)");
}

}  // namespace hqpulse
