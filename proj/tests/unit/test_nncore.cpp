#include <doctest.h>

#include <cmath>
#include <limits>
#include <set>

#include "htmlphish/adam.hpp"
#include "htmlphish/error.hpp"
#include "htmlphish/layers.hpp"
#include "support/gradient_suites.hpp"

using namespace htmlphish;
using namespace htmlphish::nn;
using testing::kGradTolerance;

namespace {

Tensor vec(std::vector<double> v) {
  const std::size_t n = v.size();
  return Tensor::from({n}, std::move(v));
}

std::vector<double> values(const Tensor& t) { return {t.data().begin(), t.data().end()}; }

}  // namespace

TEST_CASE("tensor shape and storage") {
  Tensor t({2, 3, 4}, 1.5);
  CHECK(t.rank() == 3);
  CHECK(t.size() == 24);
  CHECK(t.shape_string() == "[2,3,4]");
  t(1, 2, 3) = 7.0;
  CHECK(t[23] == 7.0);
  CHECK(t.row(1).size() == 12);

  CHECK_THROWS_AS(Tensor::from({2, 2}, {1, 2, 3}), ShapeError);
  CHECK_THROWS_AS(Tensor({1, 2, 3, 4}), ShapeError);
  CHECK_THROWS_AS(t.reshaped({5}), ShapeError);
  CHECK(t.reshaped({24}).size() == 24);

  Tensor a = vec({1, 2});
  a.add_scaled(vec({10, 20}), 0.5);
  CHECK(values(a) == std::vector<double>{6, 12});
  CHECK_THROWS_AS(a.add_scaled(vec({1}), 1.0), ShapeError);
}

TEST_CASE("tensor equality is bitwise") {
  CHECK(vec({0.0}) == vec({0.0}));
  CHECK_FALSE(vec({0.0}) == vec({-0.0}));
  const double nan = std::numeric_limits<double>::quiet_NaN();
  CHECK(vec({nan}) == vec({nan}));
  CHECK_FALSE(vec({1, 2}) == Tensor::from({2, 1}, {1, 2}));
  CHECK_FALSE(vec({nan}).all_finite());
}

TEST_CASE("rng streams are reproducible and independent") {
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());

  // SplitMix64 reference outputs for seed 0.
  Rng r(0);
  CHECK(r.next_u64() == 0xE220A8397B1DCDAFULL);
  CHECK(r.next_u64() == 0x6E789E6AA1B965F4ULL);

  const Rng root(7);
  CHECK(root.fork(1).state() == Rng(7).fork(1).state());
  CHECK(root.fork(1).state() != root.fork(2).state());
  CHECK(root.state() == 7);

  Rng u(3);
  std::set<std::uint64_t> seen;
  for (int i = 0; i < 10000; ++i) {
    const double x = u.uniform();
    CHECK((x >= 0.0 && x < 1.0));
    const auto k = u.below(6);
    CHECK(k < 6);
    seen.insert(k);
  }
  CHECK(seen.size() == 6);
}

TEST_CASE("embedding gathers rows") {
  const Tensor table = Tensor::from({3, 2}, {0, 1, 10, 11, 20, 21});
  const std::vector<std::uint32_t> ids = {2, 0};
  CHECK(values(embedding_forward(ids, table)) == std::vector<double>{20, 21, 0, 1});
  const std::vector<std::uint32_t> pads = {0, 0, 0};
  CHECK(values(embedding_forward(pads, table)) == std::vector<double>{0, 1, 0, 1, 0, 1});

  Tensor grad({3, 2});
  const std::vector<std::uint32_t> rep = {1, 1, 2};
  embedding_backward(rep, Tensor::from({3, 2}, {1, 2, 3, 4, 5, 6}), grad);
  CHECK(values(grad) == std::vector<double>{0, 0, 4, 6, 5, 6});

  const std::vector<std::uint32_t> bad = {3};
  CHECK_THROWS_AS(embedding_forward(bad, table), ShapeError);
}

TEST_CASE("embedding gradient on a 3x2 table") {
  Rng rng(5);
  Tensor table = testing::random_tensor({3, 2}, rng);
  const std::vector<std::uint32_t> ids = {2, 0, 2, 1};
  const Tensor w = testing::random_tensor({4, 2}, rng);
  Tensor grad({3, 2});
  embedding_backward(ids, w, grad);
  const auto check = testing::check_gradient(
      table, grad, [&] { return testing::probe(embedding_forward(ids, table), w); });
  CHECK(check.max_rel_error <= kGradTolerance);
}

TEST_CASE("conv1d forward") {
  const Tensor x = Tensor::from({3, 1}, {1, 2, 3});
  CHECK(values(conv1d_forward(x, Tensor({1, 1, 1}, 1.0), Tensor({1}))) == values(x));
  const Tensor f = Tensor::from({1, 2, 1}, {1, -1});
  const Tensor y = conv1d_forward(x, f, Tensor({1}));
  CHECK(y.dim(0) == 2);
  CHECK(values(y) == std::vector<double>{-1, -1});
  CHECK_THROWS_AS(conv1d_forward(x, Tensor({1, 4, 1}), Tensor({1})), ShapeError);
}

TEST_CASE("conv1d gradient on a 7x3 input with 2 filters of width 3") {
  Rng rng(6);
  Tensor input = testing::random_tensor({7, 3}, rng);
  Tensor filters = testing::random_tensor({2, 3, 3}, rng);
  Tensor bias = testing::random_tensor({2}, rng);
  const Tensor w = testing::random_tensor({5, 2}, rng);
  const auto g = conv1d_backward(input, filters, w);
  auto f = [&] { return testing::probe(conv1d_forward(input, filters, bias), w); };
  CHECK(testing::check_gradient(input, g.input, f).max_rel_error <= kGradTolerance);
  CHECK(testing::check_gradient(filters, g.filters, f).max_rel_error <= kGradTolerance);
  CHECK(testing::check_gradient(bias, g.bias, f).max_rel_error <= kGradTolerance);
}

TEST_CASE("relu") {
  CHECK(values(relu_forward(vec({-1, 0, 2}))) == std::vector<double>{0, 0, 2});
  CHECK(values(relu_forward(vec({0.5, 3}))) == std::vector<double>{0.5, 3});
  CHECK(values(relu_backward(vec({-1, 0, 2}), vec({5, 5, 5}))) == std::vector<double>{0, 0, 5});
}

TEST_CASE("maxpool") {
  const auto col = maxpool1d_forward(Tensor::from({6, 1}, {3, 1, 4, 1, 5, 9}));
  CHECK(values(col.output) == std::vector<double>{3, 4, 9});
  const auto odd = maxpool1d_forward(Tensor::from({5, 1}, {1, 2, 3, 4, 100}));
  CHECK(values(odd.output) == std::vector<double>{2, 4});
  const auto flat = maxpool1d_forward(Tensor({4, 2}, 7.0));
  CHECK(values(flat.output) == std::vector<double>(4, 7.0));

  const Tensor tie = Tensor::from({2, 1}, {2, 2});
  const auto fwd = maxpool1d_forward(tie);
  CHECK(values(maxpool1d_backward(fwd, tie, vec({1.0}).reshaped({1, 1}))) == std::vector<double>{1, 0});
}

TEST_CASE("dense") {
  const Tensor eye = Tensor::from({2, 2}, {1, 0, 0, 1});
  CHECK(values(dense_forward(vec({3, 4}), eye, Tensor({2}))) == std::vector<double>{3, 4});
  CHECK(values(dense_forward(vec({1, 2}), Tensor::from({2, 1}, {1, 1}), vec({0.5}))) ==
        std::vector<double>{3.5});
  CHECK_THROWS_AS(dense_forward(vec({1, 2, 3}), eye, Tensor({2})), ShapeError);
}

TEST_CASE("dropout") {
  Rng rng(9);
  const Tensor x = vec({1, 2, 3, 4});
  CHECK(dropout_forward(x, 0.0, Mode::Train, rng).output == x);
  CHECK(dropout_forward(x, 0.0, Mode::Infer, rng).output == x);
  CHECK(dropout_forward(x, 0.7, Mode::Infer, rng).output == x);

  Rng r1(10), r2(10);
  const auto a = dropout_forward(Tensor({64}, 1.0), 0.5, Mode::Train, r1);
  const auto b = dropout_forward(Tensor({64}, 1.0), 0.5, Mode::Train, r2);
  CHECK(a.mask == b.mask);
  for (double m : a.mask.data()) CHECK((m == 0.0 || m == 2.0));

  CHECK_THROWS_AS(dropout_forward(x, 1.0, Mode::Train, rng), Error);
  CHECK_THROWS_AS(dropout_forward(x, -0.1, Mode::Train, rng), Error);
}

TEST_CASE("sigmoid is stable") {
  CHECK(sigmoid(0.0) == 0.5);
  CHECK(sigmoid(500.0) == 1.0);
  CHECK(sigmoid(-500.0) >= 0.0);
  CHECK(sigmoid(-500.0) < 1e-200);
  for (double x : {-1e308, -745.0, 745.0, 1e308}) CHECK(std::isfinite(sigmoid(x)));

  Tensor x = vec({-2, 0, 3});
  const Tensor w = vec({1, 1, 1});
  const auto g = sigmoid_backward(sigmoid_forward(x), w);
  const auto check = testing::check_gradient(x, g, [&] { return testing::probe(sigmoid_forward(x), w); });
  CHECK(check.max_rel_error <= kGradTolerance);
}

TEST_CASE("binary cross-entropy") {
  CHECK(bce_loss(0.5, 1).loss == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(bce_loss(1.0, 1).loss < 1e-11);
  CHECK(bce_loss(0.0, 0).loss < 1e-11);
  CHECK(std::isfinite(bce_loss(0.0, 1).loss));
  CHECK(bce_loss(0.3, 1).logit_grad == doctest::Approx(-0.7));
  CHECK(bce_with_logit(0.0, 0).loss == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(std::isfinite(bce_with_logit(-800.0, 1).loss));
  CHECK(bce_with_logit(-800.0, 1).loss == doctest::Approx(800.0));
  CHECK(bce_with_logit(2.0, 1).loss == doctest::Approx(bce_loss(sigmoid(2.0), 1).loss).epsilon(1e-12));
}

TEST_CASE("randomised layer gradient suites") {
  Rng rng(2024);
  CHECK(testing::embedding_suite(rng, 20).max_rel_error <= kGradTolerance);
  CHECK(testing::conv1d_suite(rng, 20).max_rel_error <= kGradTolerance);
  CHECK(testing::relu_suite(rng, 20).max_rel_error <= kGradTolerance);
  CHECK(testing::maxpool_suite(rng, 20).max_rel_error <= kGradTolerance);
  CHECK(testing::dense_suite(rng, 20).max_rel_error <= kGradTolerance);
  CHECK(testing::dropout_suite(rng, 20).max_rel_error <= kGradTolerance);
  CHECK(testing::sigmoid_suite(rng, 20).max_rel_error <= kGradTolerance);
  CHECK(testing::bce_suite(rng, 20).max_rel_error <= kGradTolerance);
}

TEST_CASE("layer outputs stay finite on extreme inputs") {
  Rng rng(77);
  Tensor input({6, 2});
  for (double& v : input.data()) v = rng.uniform(-1e150, 1e150);
  const Tensor filters = testing::random_tensor({2, 3, 2}, rng);
  const auto conv = conv1d_forward(input, filters, Tensor({2}));
  CHECK(conv.all_finite());
  CHECK(relu_forward(conv).all_finite());
  CHECK(maxpool1d_forward(conv).output.all_finite());
  CHECK(sigmoid_forward(conv).all_finite());
}

TEST_CASE("adam first step") {
  Tensor theta({1}, 0.0);
  const Tensor g({1}, 1.0);
  Tensor* params[] = {&theta};
  const Tensor* grads[] = {&g};
  auto state = AdamState::init({}, params);
  adam_step(params, grads, state);
  CHECK(state.step == 1);
  CHECK(theta[0] == doctest::Approx(-0.0015 / (1.0 + 1e-8)).epsilon(1e-12));
  CHECK(theta[0] == doctest::Approx(-0.00149999999).epsilon(1e-9));
}

TEST_CASE("adam leaves parameters alone for a zero gradient") {
  Tensor theta = vec({0.3, -0.2});
  const Tensor g({2}, 0.0);
  Tensor* params[] = {&theta};
  const Tensor* grads[] = {&g};
  auto state = AdamState::init({}, params);
  adam_step(params, grads, state);
  CHECK(values(theta) == std::vector<double>{0.3, -0.2});
}

TEST_CASE("adam two-step trace with a constant gradient") {
  for (double gv : {1.0, -2.5}) {
    Tensor theta({1}, 0.0);
    const Tensor g({1}, gv);
    Tensor* params[] = {&theta};
    const Tensor* grads[] = {&g};
    auto state = AdamState::init({}, params);

    // Hand trace of the update equations.
    const long double lr = 0.0015L, b1 = 0.9L, b2 = 0.999L, eps = 1e-8L;
    long double m = 0, v = 0, th = 0;
    double previous = 0.0;
    for (int t = 1; t <= 2; ++t) {
      m = b1 * m + (1 - b1) * gv;
      v = b2 * v + (1 - b2) * gv * gv;
      const long double mh = m / (1 - std::pow(b1, t));
      const long double vh = v / (1 - std::pow(b2, t));
      th -= lr * mh / (std::sqrt(vh) + eps);
      adam_step(params, grads, state);
      CHECK(theta[0] == doctest::Approx(static_cast<double>(th)).epsilon(1e-12));
      // Monotone movement opposite the gradient sign.
      CHECK((theta[0] - previous) * gv < 0.0);
      previous = theta[0];
    }
    CHECK(state.step == 2);
  }
}

TEST_CASE("adam rejects mismatched shapes") {
  Tensor theta({2});
  const Tensor g({3});
  Tensor* params[] = {&theta};
  const Tensor* grads[] = {&g};
  auto state = AdamState::init({}, params);
  CHECK_THROWS_AS(adam_step(params, grads, state), ShapeError);
}
