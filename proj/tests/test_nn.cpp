#include <doctest.h>

#include <cmath>

#include "taei/nn.hpp"

using namespace taei;
using namespace taei::nn;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

MatrixXd random_matrix(int r, int c, Rng& rng) {
    MatrixXd m(r, c);
    for (int j = 0; j < c; ++j)
        for (int i = 0; i < r; ++i) m(i, j) = 2.0 * rng.uniform() - 1.0;
    return m;
}

// naive triple-loop matmul + activation
MatrixXd dense_oracle(const DenseLayer& l, const MatrixXd& x) {
    MatrixXd y(x.rows(), l.weights.cols());
    for (Eigen::Index i = 0; i < x.rows(); ++i)
        for (Eigen::Index j = 0; j < l.weights.cols(); ++j) {
            double s = l.bias(j);
            for (Eigen::Index k = 0; k < x.cols(); ++k) s += x(i, k) * l.weights(k, j);
            y(i, j) = l.activation == Activation::ReLU ? std::max(0.0, s) : s;
        }
    return y;
}

}  // namespace

TEST_CASE("dense_forward identity and relu basics") {
    DenseLayer l{MatrixXd::Identity(2, 2), VectorXd::Zero(2), Activation::Identity};
    MatrixXd x(1, 2);
    x << 1, 2;
    CHECK(dense_forward(l, x).isApprox(x));

    l.activation = Activation::ReLU;
    x << -1, 2;
    MatrixXd y = dense_forward(l, x);
    CHECK(y(0, 0) == 0.0);
    CHECK(y(0, 1) == 2.0);

    CHECK_THROWS_AS(dense_forward(l, MatrixXd::Zero(1, 3)), std::invalid_argument);
}

TEST_CASE("dense_forward matches triple-loop oracle") {
    Rng rng(7);
    DenseLayer l = make_dense(3, 4, Activation::ReLU, rng);
    l.bias = VectorXd::Random(4);
    MatrixXd x = random_matrix(2, 3, rng);
    CHECK((dense_forward(l, x) - dense_oracle(l, x)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("dense_forward identity activation is linear") {
    Rng rng(11);
    DenseLayer l = make_dense(4, 3, Activation::Identity, rng);
    l.bias.setZero();  // linearity (not affinity) needs zero bias
    MatrixXd x1 = random_matrix(2, 4, rng), x2 = random_matrix(2, 4, rng);
    const double a = 0.7, b = -1.3;
    MatrixXd lhs = dense_forward(l, a * x1 + b * x2);
    MatrixXd rhs = a * dense_forward(l, x1) + b * dense_forward(l, x2);
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("mlp gradients: zero-weight net, zero target") {
    Mlp mlp;
    mlp.layers.push_back({MatrixXd::Zero(3, 2), VectorXd::Zero(2), Activation::Identity});
    MatrixXd x(2, 3);
    x << 1, 2, 3, 4, 5, 6;
    MlpCache cache;
    MatrixXd y = mlp_forward(mlp, x, &cache);
    auto loss = mse_loss(y, MatrixXd::Zero(2, 2));
    CHECK(loss.loss == 0.0);
    auto g = mlp_backward(mlp, cache, loss.grad);
    CHECK(g.d_weights[0].cwiseAbs().maxCoeff() == 0.0);
    CHECK(g.d_bias[0].cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("mlp gradients: closed-form least-squares gradient") {
    Rng rng(3);
    Mlp mlp;
    mlp.layers.push_back(make_dense(3, 2, Activation::Identity, rng));
    MatrixXd x = random_matrix(1, 3, rng);
    MatrixXd t = random_matrix(1, 2, rng);
    MlpCache cache;
    MatrixXd y = mlp_forward(mlp, x, &cache);
    auto loss = mse_loss(y, t);
    auto g = mlp_backward(mlp, cache, loss.grad);
    MatrixXd expected = 2.0 * x.transpose() * (x * mlp.layers[0].weights +
                                               mlp.layers[0].bias.transpose().replicate(1, 1) - t);
    CHECK((g.d_weights[0] - expected).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("mlp gradients: finite-difference check on a random relu net") {
    Rng rng(17);
    Mlp mlp;
    mlp.layers.push_back(make_dense(4, 6, Activation::ReLU, rng));
    mlp.layers.push_back(make_dense(6, 3, Activation::Identity, rng));
    MatrixXd x = random_matrix(5, 4, rng);
    MatrixXd t = random_matrix(5, 3, rng);

    std::vector<ParamRef> params;
    for (auto& l : mlp.layers) {
        params.push_back({l.weights.data(), l.weights.size()});
        params.push_back({l.bias.data(), l.bias.size()});
    }
    MlpCache cache;
    auto loss = mse_loss(mlp_forward(mlp, x, &cache), t);
    auto g = mlp_backward(mlp, cache, loss.grad);
    GradientSet analytic;
    for (std::size_t li = 0; li < mlp.layers.size(); ++li) {
        analytic.push_back(flatten(g.d_weights[li]));
        analytic.push_back(g.d_bias[li]);
    }
    auto loss_fn = [&] { return mse_loss(mlp_forward(mlp, x), t).loss; };
    CHECK(finite_diff_check(params, loss_fn, analytic, 1e-5) < 1e-4);
}

TEST_CASE("mse_loss values and oracle") {
    MatrixXd p(1, 2), t(1, 2);
    p << 1, 0;
    t << 0, 0;
    CHECK(mse_loss(p, p).loss == 0.0);
    CHECK(mse_loss(p, t).loss == doctest::Approx(1.0).epsilon(1e-15));

    Rng rng(5);
    MatrixXd a = random_matrix(4, 3, rng), b = random_matrix(4, 3, rng);
    double expect = 0.0;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 3; ++j) expect += (a(i, j) - b(i, j)) * (a(i, j) - b(i, j));
    expect /= 4.0;
    CHECK(mse_loss(a, b).loss == doctest::Approx(expect).epsilon(1e-12));
    CHECK_THROWS_AS(mse_loss(a, MatrixXd::Zero(2, 2)), std::invalid_argument);
}

TEST_CASE("softmax_ce_loss values, oracle and gradient row sums") {
    MatrixXd uniform = MatrixXd::Zero(2, 4);
    auto r = softmax_ce_loss(uniform, {0, 3});
    CHECK(r.loss == doctest::Approx(std::log(4.0)).epsilon(1e-12));

    MatrixXd sat = MatrixXd::Zero(1, 3);
    sat(0, 1) = 50.0;
    CHECK(softmax_ce_loss(sat, {1}).loss < 1e-20);

    Rng rng(9);
    MatrixXd logits = random_matrix(3, 5, rng);
    std::vector<int> labels = {4, 0, 2};
    auto res = softmax_ce_loss(logits, labels);
    // direct log-sum-exp oracle
    double expect = 0.0;
    for (int i = 0; i < 3; ++i) {
        double z = 0.0;
        for (int k = 0; k < 5; ++k) z += std::exp(logits(i, k));
        expect += -(logits(i, labels[i]) - std::log(z));
    }
    expect /= 3.0;
    CHECK(res.loss == doctest::Approx(expect).epsilon(1e-10));
    for (int i = 0; i < 3; ++i)
        CHECK(std::abs(res.grad.row(i).sum()) < 1e-12);
    CHECK_THROWS_AS(softmax_ce_loss(logits, std::vector<int>{0, 1, 7}),
                    std::out_of_range);
}

TEST_CASE("gaussian_kl values and oracle") {
    MatrixXd z = MatrixXd::Zero(2, 3);
    CHECK(gaussian_kl(z, z).loss == 0.0);

    MatrixXd mu = MatrixXd::Ones(1, 1);
    CHECK(gaussian_kl(mu, MatrixXd::Zero(1, 1)).loss == doctest::Approx(0.5));

    Rng rng(13);
    MatrixXd m(3, 2), lv(3, 2);
    for (int j = 0; j < 2; ++j)
        for (int i = 0; i < 3; ++i) {
            m(i, j) = 2.0 * rng.uniform() - 1.0;
            lv(i, j) = 2.0 * rng.uniform() - 1.0;
        }
    double expect = 0.0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 2; ++j)
            expect += 0.5 * (m(i, j) * m(i, j) + std::exp(lv(i, j)) - 1.0 - lv(i, j));
    expect /= 3.0;
    auto res = gaussian_kl(m, lv);
    CHECK(res.loss == doctest::Approx(expect).epsilon(1e-12));
    CHECK(res.loss >= 0.0);
}

TEST_CASE("adam: zero gradient is the identity") {
    VectorXd p(3);
    p << 1, -2, 3;
    std::vector<ParamRef> params = {{p.data(), 3}};
    AdamState st = make_adam_state(params);
    GradientSet g = {VectorXd::Zero(3)};
    adam_step(params, g, st, {});
    CHECK(p(0) == 1.0);
    CHECK(p(1) == -2.0);
    CHECK(p(2) == 3.0);
    CHECK(st.step == 1);
}

TEST_CASE("adam: one-step hand computation") {
    VectorXd p = VectorXd::Zero(1);
    std::vector<ParamRef> params = {{p.data(), 1}};
    AdamState st = make_adam_state(params);
    GradientSet g = {VectorXd::Ones(1)};
    AdamConfig cfg;
    cfg.lr = 0.1;
    adam_step(params, g, st, cfg);
    // m_hat = 1, v_hat = 1 -> step = lr / (1 + eps)
    CHECK(p(0) == doctest::Approx(-0.1 * (1.0 / (1.0 + 1e-8))).epsilon(1e-12));
}

TEST_CASE("adam: two identical steps match an independent scalar reimplementation") {
    VectorXd p = VectorXd::Constant(1, 0.5);
    std::vector<ParamRef> params = {{p.data(), 1}};
    AdamState st = make_adam_state(params);
    GradientSet g = {VectorXd::Constant(1, 0.3)};
    AdamConfig cfg;
    adam_step(params, g, st, cfg);
    adam_step(params, g, st, cfg);

    // scalar reference
    double x = 0.5, m = 0.0, v = 0.0;
    for (int t = 1; t <= 2; ++t) {
        m = cfg.beta1 * m + (1 - cfg.beta1) * 0.3;
        v = cfg.beta2 * v + (1 - cfg.beta2) * 0.09;
        const double mh = m / (1 - std::pow(cfg.beta1, t));
        const double vh = v / (1 - std::pow(cfg.beta2, t));
        x -= cfg.lr * mh / (std::sqrt(vh) + cfg.eps);
    }
    CHECK(p(0) == doctest::Approx(x).epsilon(1e-12));
}

TEST_CASE("finite_diff_check: exact on a quadratic 1-param model") {
    double w = 0.7;
    std::vector<ParamRef> params = {{&w, 1}};
    auto loss_fn = [&] { return (w - 2.0) * (w - 2.0); };
    GradientSet analytic = {VectorXd::Constant(1, 2.0 * (w - 2.0))};
    CHECK(finite_diff_check(params, loss_fn, analytic, 1e-5) < 1e-9);
}
