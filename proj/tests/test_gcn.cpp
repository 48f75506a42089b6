#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <memory>

#include "gda/gda.hpp"
#include "helpers.hpp"

using namespace gda;

namespace {

// Plain dense reimplementation of the 2-layer forward (eval mode).
DenseMatrix dense_forward(const GcnChannelParams& p, const DenseMatrix& a_hat,
                          const DenseMatrix& attrs) {
  DenseMatrix h = relu(oracle::naive_matmul(a_hat, oracle::naive_matmul(attrs, p.w0)));
  return oracle::naive_matmul(a_hat, oracle::naive_matmul(h, p.w1));
}

}  // namespace

TEST_CASE("identity propagation with identity weights is relu", "[gcn]") {
  const std::size_t n = 5;
  GcnChannelParams p;
  p.w0 = DenseMatrix(n, n);
  p.w1 = DenseMatrix(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    p.w0(i, i) = 1.0;
    p.w1(i, i) = 1.0;
  }
  Rng rng(3);
  DenseMatrix attrs = oracle::random_matrix(n, n, rng);
  DenseMatrix z = channel_forward(p, SparseMatrix::identity(n), attrs, Mode::eval);
  REQUIRE(max_abs_diff(z, relu(attrs)) < 1e-12);
}

TEST_CASE("edgeless propagation is local", "[gcn]") {
  Rng rng(5);
  GcnChannelParams p = init_channel(6, 8, 4, rng);
  SparseMatrix a_hat = normalize_adjacency(SparseMatrix::from_edges(7, {}));
  DenseMatrix attrs = oracle::random_matrix(7, 6, rng);
  DenseMatrix z = channel_forward(p, a_hat, attrs, Mode::eval);
  DenseMatrix perturbed = attrs;
  for (std::size_t j = 0; j < 6; ++j) perturbed(2, j) += 10.0;
  DenseMatrix z2 = channel_forward(p, a_hat, perturbed, Mode::eval);
  for (std::size_t i = 0; i < 7; ++i) {
    for (std::size_t j = 0; j < 4; ++j) {
      if (i == 2) continue;
      REQUIRE(z(i, j) == z2(i, j));
    }
  }
}

TEST_CASE("random channel matches the dense reimplementation", "[gcn]") {
  Rng rng(7);
  SparseMatrix a_hat = normalize_adjacency(oracle::random_adjacency(12, 0.3, rng));
  DenseMatrix attrs = oracle::random_matrix(12, 9, rng);
  GcnChannelParams p = init_channel(9, 6, 5, rng);
  DenseMatrix z = channel_forward(p, a_hat, attrs, Mode::eval);
  REQUIRE(max_abs_diff(z, dense_forward(p, a_hat.to_dense(), attrs)) < 1e-12);
}

TEST_CASE("no final nonlinearity: output is linear in W1", "[gcn]") {
  Rng rng(9);
  SparseMatrix a_hat = normalize_adjacency(oracle::random_adjacency(10, 0.3, rng));
  DenseMatrix attrs = oracle::random_matrix(10, 5, rng);
  GcnChannelParams p = init_channel(5, 7, 3, rng);
  DenseMatrix z1 = channel_forward(p, a_hat, attrs, Mode::eval);
  GcnChannelParams doubled = p;
  doubled.w1 = scale(p.w1, 2.0);
  DenseMatrix z2 = channel_forward(doubled, a_hat, attrs, Mode::eval);
  REQUIRE(max_abs_diff(z2, scale(z1, 2.0)) < 1e-12);

  // The optional last-layer activation breaks that linearity.
  DenseMatrix zr = channel_forward(p, a_hat, attrs, Mode::eval, 0.5, nullptr, true);
  REQUIRE(max_abs_diff(zr, relu(z1)) < 1e-12);
}

TEST_CASE("train-mode forward is deterministic given the seed", "[gcn]") {
  Rng rng(11);
  SparseMatrix a_hat = normalize_adjacency(oracle::random_adjacency(8, 0.4, rng));
  DenseMatrix attrs = oracle::random_matrix(8, 6, rng);
  GcnChannelParams p = init_channel(6, 5, 4, rng);
  Rng d1(77), d2(77), d3(78);
  DenseMatrix z1 = channel_forward(p, a_hat, attrs, Mode::train, 0.5, &d1);
  DenseMatrix z2 = channel_forward(p, a_hat, attrs, Mode::train, 0.5, &d2);
  DenseMatrix z3 = channel_forward(p, a_hat, attrs, Mode::train, 0.5, &d3);
  REQUIRE(z1 == z2);
  REQUIRE_FALSE(z1 == z3);
}

TEST_CASE("channel gradients pass the finite-difference check end-to-end",
          "[gcn][gradcheck]") {
  Rng rng(13);
  auto a_hat = std::make_shared<const SparseMatrix>(
      normalize_adjacency(oracle::random_adjacency(9, 0.35, rng)));
  AttrBundle attrs;
  attrs.dense = std::make_shared<DenseMatrix>(oracle::random_matrix(9, 5, rng));
  attrs.in_dim = 5;
  GcnChannelParams p = init_channel(5, 6, 4, rng);
  DenseMatrix probe = oracle::random_matrix(9, 4, rng);
  double err = oracle::check_gradients(
      {&p.w0, &p.w1}, [&](Tape& t, const std::vector<Tape::ValueId>& ids) {
        ChannelForwardIds fwd = channel_forward_tape(t, ids[0], ids[1], a_hat, attrs,
                                                     Mode::eval, 0.0, nullptr);
        return t.frobenius_dot(fwd.z, t.constant(probe));
      });
  REQUIRE(err < 1e-4);
}

TEST_CASE("glorot initialization: bounds and dimensions", "[gcn]") {
  Rng rng(17);
  GcnChannelParams p = init_channel(3703, 512, 256, rng, 1);
  REQUIRE(p.w0.rows() == 3703);
  REQUIRE(p.w0.cols() == 512);
  REQUIRE(p.w1.rows() == 512);
  REQUIRE(p.w1.cols() == 256);
  const double bound0 = std::sqrt(6.0 / (3703.0 + 512.0));
  for (std::size_t i = 0; i < 2000; ++i) {
    REQUIRE(std::abs(p.w0.data()[i]) <= bound0);
  }

  // Channel with an N-wide attribute source (UAI2010-scale dims).
  GcnChannelParams q = init_channel(3067, 256, 128, rng, 2);
  REQUIRE(q.w0.rows() == 3067);
  REQUIRE(q.w1.cols() == 128);
}

TEST_CASE("glorot sample mean is near zero", "[gcn]") {
  Rng rng(19);
  const std::size_t n = 100000;
  DenseMatrix m = glorot_uniform(n / 100, 100, rng);
  const double bound = std::sqrt(6.0 / (n / 100 + 100));
  const double mean = sum(m) / static_cast<double>(n);
  const double sigma_mean = bound / std::sqrt(3.0 * static_cast<double>(n));
  REQUIRE(std::abs(mean) < 3.0 * sigma_mean);
}

TEST_CASE("factored attribute path equals the dense path in eval mode", "[gcn]") {
  SyntheticSpec spec;
  spec.n_per_class = 10;
  Rng rng(21);
  Graph g = generate_synthetic(spec, rng);
  auto channels = prepare_channels(g, TrainConfig{});
  for (std::size_t ci : {2u, 8u}) {  // X_C-attribute channels
    const ChannelInput& ch = channels[ci];
    REQUIRE(ch.attrs->factor_left != nullptr);
    GcnChannelParams p = init_channel(ch.attrs->in_dim, 6, 4, rng);
    Tape tape;
    ChannelForwardIds fwd =
        channel_forward_tape(tape, tape.constant(p.w0), tape.constant(p.w1),
                             ch.adjacency, *ch.attrs, Mode::eval, 0.0, nullptr);
    DenseMatrix direct = channel_forward(p, *ch.adjacency, ch.attrs->materialize(),
                                         Mode::eval);
    REQUIRE(max_abs_diff(tape.value(fwd.z), direct) < 1e-12);
  }
}
