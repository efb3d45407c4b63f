#include "iqa/nss.hpp"
#include "iqa/no_reference.hpp"

#include <doctest.h>

#include <random>

using namespace iqa;

namespace {

// AGGD draws parameterized by the side standard deviations: a side is picked
// with probability proportional to its scale beta, then |x| = beta * G^(1/alpha)
// with G ~ Gamma(1/alpha, 1).
std::vector<double> ggd_samples(double alpha, std::size_t n, std::uint64_t seed, double sigma_l = 1.0,
                                double sigma_r = 1.0) {
    const double to_beta = std::sqrt(std::tgamma(1.0 / alpha) / std::tgamma(3.0 / alpha));
    const double bl = sigma_l * to_beta, br = sigma_r * to_beta;
    std::mt19937_64 rng(seed);
    std::gamma_distribution<double> g(1.0 / alpha, 1.0);
    std::bernoulli_distribution right(br / (bl + br));
    std::vector<double> v(n);
    for (auto& x : v) {
        const double m = std::pow(g(rng), 1.0 / alpha);
        x = right(rng) ? br * m : -bl * m;
    }
    return v;
}

Image textured(Eigen::Index n, std::uint64_t seed, double noise) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> d(0.0, noise);
    Image::Array a(n, n);
    for (Eigen::Index r = 0; r < n; ++r)
        for (Eigen::Index c = 0; c < n; ++c)
            a(r, c) = std::clamp(0.5 * std::sin(0.3 * double(r)) * std::cos(0.17 * double(c)) + d(rng), -1.0, 1.0);
    return Image(a, Domain::Normalized);
}

}  // namespace

TEST_CASE("ggd shape recovery") {
    const auto gauss = ggd_samples(2.0, 100000, 1);
    const auto lap = ggd_samples(1.0, 100000, 2);
    CHECK(std::abs(fit_ggd(gauss).alpha - 2.0) < 0.15);
    CHECK(std::abs(fit_ggd(lap).alpha - 1.0) < 0.1);
    for (double alpha : {0.6, 1.5, 3.0}) {
        const auto s = ggd_samples(alpha, 100000, 7);
        CHECK(std::abs(fit_ggd(s).alpha - alpha) < 0.1 * alpha + 0.05);
    }

    std::mt19937_64 rng(3);
    std::normal_distribution<double> n(0.0, 2.5);
    std::vector<double> g(100000);
    for (auto& x : g) x = n(rng);
    const GgdFit fit = fit_ggd(g);
    CHECK(std::abs(fit.alpha - 2.0) < 0.15);
    CHECK(fit.sigma == doctest::Approx(2.5).epsilon(0.02));

    const std::vector<double> zeros(10, 0.0);
    CHECK_THROWS_AS(fit_ggd(zeros), std::invalid_argument);
}

TEST_CASE("ggd fit is scale invariant in shape") {
    auto s = ggd_samples(1.3, 20000, 4);
    const GgdFit a = fit_ggd(s);
    for (auto& x : s) x *= 37.0;
    CHECK(fit_ggd(s).alpha == a.alpha);
    CHECK(fit_ggd(s).sigma == doctest::Approx(37.0 * a.sigma).epsilon(1e-12));
}

TEST_CASE("aggd recovery and side symmetry") {
    const auto gauss = ggd_samples(2.0, 100000, 11);
    const AggdFit g = fit_aggd(gauss);
    CHECK(std::abs(g.alpha - 2.0) < 0.15);
    CHECK(std::abs(g.sigma_l - g.sigma_r) / std::max(g.sigma_l, g.sigma_r) < 0.05);
    CHECK(std::abs(g.eta) < 0.02);

    const AggdFit l = fit_aggd(ggd_samples(1.0, 100000, 12));
    CHECK(std::abs(l.alpha - 1.0) < 0.1);
    CHECK(std::abs(l.sigma_l - l.sigma_r) / std::max(l.sigma_l, l.sigma_r) < 0.05);

    const AggdFit skew = fit_aggd(ggd_samples(2.0, 100000, 13, 1.0, 2.0));
    CHECK(std::abs(skew.alpha - 2.0) < 0.2);
    CHECK(std::abs(skew.sigma_l - 1.0) < 0.1);
    CHECK(std::abs(skew.sigma_r - 2.0) < 0.2);
    CHECK(skew.eta > 0.0);

    auto mirrored = ggd_samples(1.5, 50000, 14, 0.7, 1.3);
    const AggdFit fwd = fit_aggd(mirrored);
    for (auto& x : mirrored) x = -x;
    const AggdFit rev = fit_aggd(mirrored);
    CHECK(rev.sigma_l == fwd.sigma_r);
    CHECK(rev.sigma_r == fwd.sigma_l);
    CHECK(rev.eta == -fwd.eta);
    CHECK(rev.alpha == fwd.alpha);

    const std::vector<double> positive{1.0, 2.0, 3.0};
    CHECK_THROWS_AS(fit_aggd(positive), std::invalid_argument);
}

TEST_CASE("mscn maps") {
    const Eigen::ArrayXXd flat = Eigen::ArrayXXd::Constant(20, 20, 90.0);
    const MscnMaps m = mscn_maps(flat);
    CHECK(m.coefficients.abs().maxCoeff() < 1e-12);
    CHECK(m.local_sigma.abs().maxCoeff() < 1e-5);  // E[x^2] - mu^2 cancellation

    std::mt19937_64 rng(5);
    std::normal_distribution<double> n(128.0, 20.0);
    Eigen::ArrayXXd noise(128, 128);
    for (Eigen::Index i = 0; i < noise.size(); ++i) noise(i) = n(rng);
    const MscnMaps w = mscn_maps(noise);
    CHECK(std::abs(w.coefficients.mean()) < 0.02);
    // affine shift of intensity does not change the coefficients
    const MscnMaps shifted = mscn_maps(noise + 40.0);
    CHECK((shifted.coefficients - w.coefficients).abs().maxCoeff() < 1e-9);

    CHECK_THROWS_AS(mscn_maps(flat, MscnParams{1.0, 0, 1.0}), std::invalid_argument);
    const Image im = mscn(Image(Image::Array(flat), Domain::HU), 7.0 / 6.0, 3, 1.0);
    CHECK(im.width() == 20);
}

TEST_CASE("brisque feature vector layout") {
    const Image img = textured(64, 1, 0.05);
    const NssFeatureVector f = brisque_features(img);
    CHECK(f.allFinite());
    for (int s = 0; s < 2; ++s) {
        CHECK(f(18 * s) > 0.0);      // ggd alpha
        CHECK(f(18 * s + 1) > 0.0);  // ggd variance
        for (int k = 0; k < 4; ++k) {
            CHECK(f(18 * s + 2 + 4 * k) > 0.0);
            CHECK(f(18 * s + 4 + 4 * k) > 0.0);
            CHECK(f(18 * s + 5 + 4 * k) > 0.0);
        }
    }
    // the first-scale block equals the standalone scale features
    const NssScaleFeatures first = nss_scale_features(mscn_maps(nss_intensity(img)).coefficients);
    CHECK((f.head<18>() - first).cwiseAbs().maxCoeff() == 0.0);
    CHECK_THROWS_AS(brisque_features(Image::constant(15, 40, 0.0)), std::invalid_argument);
}

TEST_CASE("niqe patch selection and features") {
    Image::Array a = textured(192, 2, 0.02).values();
    a.block(0, 0, 96, 96) = 0.1;  // flat patch, no sharpness
    const Image img(a, Domain::Normalized);
    const auto keep = niqe_patch_selection(img, NiqeParams{});
    REQUIRE(keep.size() == 4);
    CHECK_FALSE(keep[0]);
    const auto feats = niqe_patch_features(img, 96, 0.75);
    CHECK(feats.size() == static_cast<std::size_t>(std::count(keep.begin(), keep.end(), true)));
    for (const auto& f : feats) CHECK(f.allFinite());
    CHECK_THROWS_AS(niqe_patch_features(img, 95, 0.75), std::invalid_argument);
    CHECK_THROWS_AS(niqe_patch_features(Image::constant(50, 50, 0.0), 96, 0.75), std::invalid_argument);
}

TEST_CASE("niqe model fit and distance") {
    std::vector<NssFeatureVector> corpus;
    for (int i = 0; i < 12; ++i) {
        const auto f = niqe_patch_features(textured(192, 100 + i, 0.02), 96, 0.5);
        corpus.insert(corpus.end(), f.begin(), f.end());
    }
    REQUIRE(corpus.size() >= 37);
    const MvgModel model = fit_niqe_model(corpus);
    CHECK(model.mean.size() == 36);
    CHECK((model.cov - model.cov.transpose()).cwiseAbs().maxCoeff() < 1e-12);

    const auto clean = niqe_patch_features(textured(192, 500, 0.02), 96, 0.5);
    const auto dirty = niqe_patch_features(textured(192, 501, 0.25), 96, 0.5);
    CHECK(niqe_score(clean, model) < niqe_score(dirty, model));

    Eigen::VectorXd m = Eigen::VectorXd::Zero(2);
    Eigen::MatrixXd c = Eigen::MatrixXd::Identity(2, 2);
    Eigen::VectorXd m2(2);
    m2 << 3.0, 4.0;
    CHECK(mvg_distance(m, c, m2, c) == doctest::Approx(5.0));
    Eigen::MatrixXd singular = Eigen::MatrixXd::Zero(2, 2);
    singular(0, 0) = 1.0;
    CHECK_THROWS_AS(mvg_distance(m, singular, m2, singular, false), std::domain_error);
    CHECK(mvg_distance(m, singular, m2, singular, true) == doctest::Approx(3.0));

    CHECK_THROWS_AS(fit_niqe_model(std::vector<NssFeatureVector>(36, NssFeatureVector::Ones())), std::invalid_argument);
}
