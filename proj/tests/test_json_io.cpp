#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <string>

#include "hqpulse/json_io.hpp"
#include "hqpulse/rng.hpp"

using namespace hqpulse;

namespace {

PulseSequence sample_sequence(Topology t) {
  rng::Stream st(61);
  PulseSequence seq;
  seq.topology = t;
  seq.j12_frozen = 0.5;
  seq.gate = "test";
  seq.fidelity = 0.99991;
  seq.seed = 424242;
  for (int k = 0; k < 3; ++k) {
    PulseStep s;
    s.tau = st.uniform(0.0, 2.0);
    s.couplings.topology = t;
    s.couplings.a = {st.uniform(), st.uniform(), 0.5};
    if (t != Topology::Single) {
      s.couplings.b = {st.uniform(), st.uniform(), 0.5};
      s.couplings.inter = {st.uniform(), st.uniform()};
    }
    seq.steps.push_back(s);
  }
  return seq;
}

}  // namespace

TEST_CASE("sequence JSON round trip is exact") {
  for (Topology t : {Topology::Single, Topology::ConfigA, Topology::ConfigB}) {
    const PulseSequence seq = sample_sequence(t);
    const json j = to_json(seq);
    const PulseSequence back = sequence_from_json(json::parse(j.dump()));
    REQUIRE(back.topology == seq.topology);
    REQUIRE(back.j12_frozen == seq.j12_frozen);
    REQUIRE(back.gate == seq.gate);
    REQUIRE(back.seed == seq.seed);
    REQUIRE(back.steps.size() == seq.steps.size());
    for (std::size_t k = 0; k < seq.steps.size(); ++k) {
      REQUIRE(back.steps[k].tau == seq.steps[k].tau);
      REQUIRE(back.steps[k].couplings.a.j13 == seq.steps[k].couplings.a.j13);
      REQUIRE(back.steps[k].couplings.a.j12 == 0.5);
      if (t != Topology::Single) {
        REQUIRE(back.steps[k].couplings.b.j23 == seq.steps[k].couplings.b.j23);
        REQUIRE(back.steps[k].couplings.inter == seq.steps[k].couplings.inter);
      }
    }
    // serialization is stable byte-for-byte
    REQUIRE(to_json(back).dump() == j.dump());
  }
}

TEST_CASE("sequence JSON rejects malformed input") {
  const json good = to_json(sample_sequence(Topology::Single));

  SECTION("unknown top-level field") {
    json j = good;
    j["surprise"] = 1;
    REQUIRE_THROWS_AS(sequence_from_json(j), std::invalid_argument);
  }
  SECTION("unknown step field") {
    json j = good;
    j["steps"][0]["J_1a1b"] = 0.1;
    REQUIRE_THROWS_AS(sequence_from_json(j), std::invalid_argument);
  }
  SECTION("missing required field") {
    json j = good;
    j.erase("j12_frozen");
    REQUIRE_THROWS_AS(sequence_from_json(j), std::invalid_argument);
  }
  SECTION("empty steps") {
    json j = good;
    j["steps"] = json::array();
    REQUIRE_THROWS_AS(sequence_from_json(j), std::invalid_argument);
  }
  SECTION("negative tau") {
    json j = good;
    j["steps"][0]["tau"] = -0.25;
    REQUIRE_THROWS_AS(sequence_from_json(j), std::invalid_argument);
  }
  SECTION("coupling out of range") {
    json j = good;
    j["steps"][1]["J13"] = 1.75;
    REQUIRE_THROWS_AS(sequence_from_json(j), std::invalid_argument);
  }
  SECTION("single-qubit field names on a two-qubit file") {
    json j = to_json(sample_sequence(Topology::ConfigA));
    j["steps"][0]["J13"] = 0.5;
    REQUIRE_THROWS_AS(sequence_from_json(j), std::invalid_argument);
  }
}

TEST_CASE("hubbard parameter files") {
  SECTION("single qubit") {
    const auto j = json::parse(R"({
      "unit": "dimensionless",
      "eps": [0.0, 0.01, 0.02],
      "t13": 0.01, "t23": 0.012,
      "U": [1.0, 1.0, 1.0],
      "U12": 0.004, "U13": 0.002, "U23": 0.003,
      "Je_13": 0.005, "Jp_13": 0.001, "Jt_13": 0.0005,
      "Je_23": 0.004, "Je_12": 0.006
    })");
    const HubbardFile f = hubbard_from_json(j);
    REQUIRE_FALSE(f.two_qubit);
    REQUIRE(f.unit == "dimensionless");
    REQUIRE(f.one.eps[2] == 0.02);
    REQUIRE(f.one.t23 == 0.012);
    REQUIRE(f.one.j13.Jp == 0.001);
    REQUIRE(f.one.j12.Je == 0.006);
    REQUIRE(f.one.j23.Jt == 0.0);  // defaulted
  }

  SECTION("two qubits, config A") {
    const auto j = json::parse(R"({
      "unit": "ueV",
      "config": "A",
      "eps_a": [0, 10, 20], "U_a": [1000, 1000, 1000], "t13_a": 10, "t23_a": 8,
      "eps_b": [0, 12, 18], "U_b": [1000, 1000, 1000], "t13_b": 9, "t23_b": 7,
      "t_3a1b": 11, "U_3a1b": 5, "Je_3a1b": 2
    })");
    const HubbardFile f = hubbard_from_json(j);
    REQUIRE(f.two_qubit);
    REQUIRE(f.two.config == Topology::ConfigA);
    REQUIRE(f.two.b.t23 == 7);
    REQUIRE(f.two.t_3a1b == 11);
    REQUIRE(f.two.j_3a1b.Je == 2);
  }

  SECTION("config B rejects config A keys") {
    const auto j = json::parse(R"({
      "unit": "ueV",
      "config": "B",
      "eps_a": [0, 10, 20], "eps_b": [0, 12, 18],
      "t_3a1b": 11
    })");
    REQUIRE_THROWS_AS(hubbard_from_json(j), std::invalid_argument);
  }

  SECTION("unit is mandatory and checked") {
    auto j = json::parse(R"({"eps": [0,0,0]})");
    REQUIRE_THROWS_AS(hubbard_from_json(j), std::invalid_argument);
    j["unit"] = "eV";
    REQUIRE_THROWS_AS(hubbard_from_json(j), std::invalid_argument);
  }

  SECTION("unknown fields are rejected") {
    const auto j = json::parse(R"({
      "unit": "ueV", "eps": [0,0,0], "t31": 5
    })");
    REQUIRE_THROWS_AS(hubbard_from_json(j), std::invalid_argument);
  }

  SECTION("negative Coulomb energies are rejected") {
    const auto j = json::parse(R"({
      "unit": "ueV", "eps": [0,0,0], "U": [-1, 0, 0]
    })");
    REQUIRE_THROWS_AS(hubbard_from_json(j), std::invalid_argument);
  }
}

TEST_CASE("gate files") {
  SECTION("a valid custom gate") {
    const auto j = json::parse(R"({
      "name": "pauli-x",
      "matrix": [[[0,0],[1,0]],[[1,0],[0,0]]]
    })");
    const GateTarget g = gate_from_json(j);
    REQUIRE(g.name == "pauli-x");
    REQUIRE(std::abs(g.matrix(0, 1) - std::complex<double>(1.0)) < 1e-15);
  }
  SECTION("non-unitary matrices are rejected") {
    const auto j = json::parse(R"({
      "name": "bad",
      "matrix": [[[1,0],[1,0]],[[0,0],[1,0]]]
    })");
    REQUIRE_THROWS_AS(gate_from_json(j), std::invalid_argument);
  }
  SECTION("3x3 matrices are rejected") {
    const auto j = json::parse(R"({
      "name": "bad",
      "matrix": [[[1,0],[0,0],[0,0]],[[0,0],[1,0],[0,0]],[[0,0],[0,0],[1,0]]]
    })");
    REQUIRE_THROWS_AS(gate_from_json(j), std::invalid_argument);
  }
}

TEST_CASE("format_double round trips") {
  for (double x : {0.1, 1.0 / 3.0, 0.574398291, 1e-300, -2.5e17, 0.0}) {
    const std::string s = format_double(x);
    REQUIRE(std::strtod(s.c_str(), nullptr) == x);
  }
}

TEST_CASE("fnv1a64 matches known vectors") {
  REQUIRE(fnv1a64_hex("") == "cbf29ce484222325");
  REQUIRE(fnv1a64_hex("a") == "af63dc4c8601ec8c");
}

TEST_CASE("manifest serialization carries the run description") {
  RunManifest m;
  m.command = "spectrum";
  m.config = json{{"points", 11}};
  m.seed = 9;
  m.input_hashes["params.json"] = "00112233445566778899aabbccddeeff";
  m.wall_ms = 12.5;
  const json j = to_json(m);
  REQUIRE(j["command"] == "spectrum");
  REQUIRE(j["config"]["points"] == 11);
  REQUIRE(j["version"] == std::string(kVersion));
  REQUIRE(j["input_hashes"]["params.json"] == "00112233445566778899aabbccddeeff");
}
