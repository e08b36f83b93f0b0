#include "qdbg/flatten.hpp"
#include "qdbg/parser.hpp"
#include "qdbg/runner.hpp"
#include "qdbg/statevector.hpp"

#include "support/corpus.hpp"
#include "support/oracle.hpp"
#include "support/randprog.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <complex>

using namespace qdbg;

TEST(InitState, BasisZero) {
  const Statevector one = init_state(1);
  EXPECT_EQ(one.amplitude(0), std::complex<double>(1.0, 0.0));
  EXPECT_EQ(one.amplitude(1), std::complex<double>(0.0, 0.0));

  const Statevector three = init_state(3);
  ASSERT_EQ(three.size(), 8U);
  EXPECT_EQ(three.amplitude(0), std::complex<double>(1.0, 0.0));
  for (std::size_t i = 1; i < 8; ++i) {
    EXPECT_EQ(three.amplitude(i), std::complex<double>(0.0, 0.0));
  }
}

TEST(InitState, CeilingEnforced) {
  SimLimits limits;
  limits.max_qubits = 24;
  EXPECT_THROW(init_state(25, limits), ResourceLimitError);
  EXPECT_NO_THROW(init_state(10, limits));
}

TEST(ApplyGate, HadamardOnZero) {
  Statevector state = init_state(1);
  const int target[] = {0};
  state.apply_unitary(Op::H, 0.0, target, {});
  EXPECT_NEAR(state.amplitude(0).real(), 1.0 / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(state.amplitude(1).real(), 1.0 / std::sqrt(2.0), 1e-15);
}

TEST(ApplyGate, CczPhases) {
  // |110>: controls q0, q1 set, target q2 clear -> unchanged.
  Statevector state = init_state(3);
  const int q0[] = {0};
  const int q1[] = {1};
  const int q2[] = {2};
  state.apply_unitary(Op::X, 0.0, q0, {});
  state.apply_unitary(Op::X, 0.0, q1, {});
  const int controls[] = {0, 1};
  state.apply_unitary(Op::Z, 0.0, q2, controls);
  EXPECT_NEAR(std::abs(state.amplitude(3) - std::complex<double>(1.0, 0.0)),
              0.0, 1e-15);

  // |111> picks up a minus sign.
  state.apply_unitary(Op::X, 0.0, q2, {});
  state.apply_unitary(Op::Z, 0.0, q2, controls);
  EXPECT_NEAR(std::abs(state.amplitude(7) - std::complex<double>(-1.0, 0.0)),
              0.0, 1e-15);
}

TEST(ApplyGate, CorrectedGroverProbability) {
  // Two iterations of 3-qubit Grover: P(|111>) = sin^2(5 asin(1/sqrt 8)).
  std::string source = corpus::load("grover_fixed.qasm");
  source = source.substr(0, source.find("measure"));
  const ExecutionTrace trace = run(flatten(parse(source)), 0);
  double p111 = 0.0;
  for (std::size_t i = 0; i < trace.final_state.size(); ++i) {
    if ((i & 7U) == 7U) {
      p111 += std::norm(trace.final_state.amplitude(i));
    }
  }
  const double analytic = oracle::grover_probability(3, 2);
  EXPECT_NEAR(analytic, 0.9453125, 1e-12); // 121/128
  EXPECT_NEAR(p111, analytic, 1e-10);

  // The explicit matrix-product oracle agrees amplitude-wise.
  const FlatProgram flat = flatten(parse(source));
  const oracle::Vector expected = oracle::final_state(flat);
  for (std::size_t i = 0; i < trace.final_state.size(); ++i) {
    EXPECT_NEAR(std::abs(trace.final_state.amplitude(i) -
                         expected(static_cast<Eigen::Index>(i))),
                0.0, 1e-10);
  }
}

TEST(ProbabilityOne, Examples) {
  Statevector state = init_state(1);
  EXPECT_DOUBLE_EQ(state.probability_one(0), 0.0);
  const int q0[] = {0};
  state.apply_unitary(Op::H, 0.0, q0, {});
  EXPECT_NEAR(state.probability_one(0), 0.5, 1e-15);

  // Listing 1 after `x flag`: the flag qubit is certainly 1.
  const FlatProgram flat =
      flatten(parse("qreg q[3]; qreg flag[1]; x flag;"));
  const ExecutionTrace trace = run(flat, 0);
  EXPECT_NEAR(trace.final_state.probability_one(3), 1.0, 1e-15);
}

TEST(Measure, CollapsesAndRecords) {
  const FlatProgram flat = flatten(
      parse("qreg q[2]; creg c[2]; h q[0]; cx q[0], q[1]; measure q -> c;"));
  for (const std::uint64_t seed : {0ULL, 1ULL, 7ULL, 42ULL}) {
    const ExecutionTrace trace = run(flat, seed);
    // Bell state: both bits agree, and the state collapsed onto that branch.
    EXPECT_EQ(trace.classical_bits[0], trace.classical_bits[1]);
    const std::size_t basis = trace.classical_bits[0] == 1 ? 3 : 0;
    EXPECT_NEAR(std::abs(trace.final_state.amplitude(basis)), 1.0, 1e-12);
  }
}

TEST(Measure, DeterministicUnderSeed) {
  const std::string source =
      "qreg q[4]; creg c[4]; h q; cx q[0], q[3]; measure q -> c;";
  const FlatProgram flat = flatten(parse(source));
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const ExecutionTrace a = run(flat, seed);
    const ExecutionTrace b = run(flat, seed);
    EXPECT_EQ(a.classical_bits, b.classical_bits);
    for (std::size_t i = 0; i < a.final_state.size(); ++i) {
      EXPECT_EQ(a.final_state.amplitude(i), b.final_state.amplitude(i));
    }
  }
}

TEST(Reset, ForcesZero) {
  const FlatProgram flat = flatten(parse("qreg q[1]; h q[0]; reset q[0];"));
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    const ExecutionTrace trace = run(flat, seed);
    EXPECT_NEAR(trace.final_state.probability_one(0), 0.0, 1e-12);
    EXPECT_NEAR(trace.final_state.norm(), 1.0, 1e-12);
  }
}

TEST(Properties, NormPreservationSmoke) {
  RngState rng{4242, 0};
  for (int trial = 0; trial < 20; ++trial) {
    randprog::Config config;
    config.num_qubits = 2 + static_cast<int>(rng.uniform_index(4));
    config.num_gates = 40;
    const std::string source = randprog::unitary_program(config, rng);
    const ExecutionTrace trace = run(flatten(parse(source)), 0);
    EXPECT_NEAR(trace.final_state.norm(), 1.0, 1e-10) << source;
  }
}

TEST(Properties, MatrixOracleSmoke) {
  RngState rng{777, 0};
  for (int trial = 0; trial < 20; ++trial) {
    randprog::Config config;
    config.num_qubits = 2 + static_cast<int>(rng.uniform_index(4));
    config.num_gates = 25;
    const std::string source = randprog::unitary_program(config, rng);
    const FlatProgram flat = flatten(parse(source));
    const ExecutionTrace trace = run(flat, 0);
    const oracle::Vector expected = oracle::final_state(flat);
    for (std::size_t i = 0; i < trace.final_state.size(); ++i) {
      ASSERT_NEAR(std::abs(trace.final_state.amplitude(i) -
                           expected(static_cast<Eigen::Index>(i))),
                  0.0, 1e-9)
          << source;
    }
  }
}
