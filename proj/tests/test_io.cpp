#include "iqa/diagnostics.hpp"
#include "iqa/embedding_io.hpp"
#include "iqa/metric_table.hpp"

#include <doctest.h>

#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

using namespace iqa;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "iqa_io_tests";
    fs::create_directories(dir);
    return dir / name;
}

void write_text(const fs::path& p, const std::string& s) {
    std::ofstream out(p);
    out << s;
}

struct WarningCapture {
    std::vector<std::string> seen;
    WarningHandler previous;
    WarningCapture() {
        previous = set_warning_handler([this](const std::string& m) { seen.push_back(m); });
    }
    ~WarningCapture() { set_warning_handler(previous); }
};

EmbeddingRecord record(const std::string& id, const std::string& tensor, std::vector<std::uint32_t> dims,
                       std::mt19937_64& rng) {
    std::size_t n = 1;
    for (auto d : dims) n *= d;
    std::normal_distribution<float> g(0.0f, 1.0f);
    EmbeddingRecord r{id, tensor, dims, std::vector<float>(n)};
    for (auto& v : r.values) v = g(rng);
    return r;
}

}  // namespace

TEST_CASE("IQAE round trip preserves payload bits") {
    std::mt19937_64 rng(1);
    EmbeddingFile f;
    f.records.push_back(record(denoised_key("img1"), "conv1", {3, 4, 5}, rng));
    f.records.push_back(record(denoised_key("img1"), "pool", {9, 16}, rng));
    f.records.push_back(record(reference_key("img1"), "pool", {16}, rng));
    f.records[0].values[3] = std::numeric_limits<float>::denorm_min();

    for (const std::string meta : {"", "{\"weights_hash\":\"abc\",\"layers\":[\"conv1\"]}"}) {
        f.metadata = meta;
        std::stringstream ss;
        write_iqae(ss, f);
        const EmbeddingFile back = read_iqae(ss);
        CHECK(back.version == (meta.empty() ? 1u : 2u));
        CHECK(back.metadata == meta);
        REQUIRE(back.records.size() == f.records.size());
        for (std::size_t i = 0; i < f.records.size(); ++i) {
            CHECK(back.records[i].image_id == f.records[i].image_id);
            CHECK(back.records[i].tensor == f.records[i].tensor);
            CHECK(back.records[i].dims == f.records[i].dims);
            CHECK(std::memcmp(back.records[i].values.data(), f.records[i].values.data(),
                              f.records[i].values.size() * sizeof(float)) == 0);
        }
    }

    std::stringstream bad("IQAF");
    CHECK_THROWS_AS(read_iqae(bad), std::runtime_error);
    EmbeddingFile mismatch;
    mismatch.records.push_back({"a", "t", {2, 2}, {1.0f}});
    std::stringstream sink;
    CHECK_THROWS_AS(write_iqae(sink, mismatch), std::invalid_argument);
}

TEST_CASE("IQAE lookups") {
    std::mt19937_64 rng(2);
    EmbeddingFile f;
    f.records.push_back(record(denoised_key("a"), "conv1", {2, 3, 3}, rng));
    f.records.push_back(record(denoised_key("a"), "conv2", {4, 6}, rng));
    f.records.push_back(record(denoised_key("a"), "pool", {5, 8}, rng));
    f.records.push_back(record(reference_key("a"), "pool", {8}, rng));
    f.records.push_back(record(reference_key("b"), "pool", {8}, rng));

    const ActivationStack s = activation_stack(f, denoised_key("a"));
    REQUIRE(s.layers.size() == 3);
    CHECK(s.layers[0].channels == 2);
    CHECK(s.layers[0].rows == 3);
    CHECK(s.layers[1].channels == 1);
    CHECK(s.layers[1].cols == 6);

    CHECK(embedding_matrix(f, denoised_key("a"), "pool").rows() == 5);
    CHECK(embedding_pool(f, "pool").rows() == 7);
    CHECK(embedding_matrix(f, reference_key("b"), "pool")(0, 2) == doctest::Approx(f.records[4].values[2]));
    CHECK_THROWS_AS(embedding_matrix(f, "missing", "pool"), std::runtime_error);
    CHECK_THROWS_AS(activation_stack(f, "missing"), std::runtime_error);
}

TEST_CASE("external score files") {
    const fs::path p = scratch("scores.csv");
    write_text(p, "image_id,score\n# comment\na, 1.5\nb,-2e-3\n");
    const auto s = read_external_scores(p);
    CHECK(s.size() == 2);
    CHECK(s.at("a") == 1.5);
    CHECK(s.at("b") == -2e-3);

    write_external_scores(p, {{"x", 0.1}, {"y", 1.0 / 3.0}});
    const auto back = read_external_scores(p);
    CHECK(back.at("y") == 1.0 / 3.0);

    write_text(p, "a,1\na,2\n");
    CHECK_THROWS_AS(read_external_scores(p), std::runtime_error);
    write_text(p, "a,notanumber\n");
    CHECK_THROWS_AS(read_external_scores(p), std::runtime_error);
    write_text(p, "");
    WarningCapture w;
    CHECK(read_external_scores(p).empty());
    CHECK(w.seen.size() == 1);
}

TEST_CASE("model json round trips") {
    SvrModel m;
    m.support_vectors = Eigen::MatrixXd::Random(3, 36);
    m.dual_coeffs = Eigen::Vector3d(1.0, -0.5, 0.25);
    m.gamma = 0.1;
    m.bias = 12.0;
    m.feature_min = Eigen::VectorXd::Constant(36, -1.0);
    m.feature_max = Eigen::VectorXd::Constant(36, 3.0);
    const SvrModel back = parse_svr_model(svr_model_to_json(m));
    CHECK(back.support_vectors == m.support_vectors);
    CHECK(back.dual_coeffs == m.dual_coeffs);
    CHECK(back.gamma == m.gamma);
    CHECK(back.score_hi == m.score_hi);
    CHECK_THROWS_AS(parse_svr_model("{\"gamma\": 1}"), std::runtime_error);
    CHECK_THROWS_AS(parse_svr_model("not json"), std::runtime_error);

    MvgModel g;
    g.mean = Eigen::VectorXd::LinSpaced(4, 0.0, 1.0);
    const Eigen::MatrixXd a = Eigen::MatrixXd::Random(4, 4);
    g.cov = a * a.transpose();
    g.n = 50;
    const MvgModel gb = parse_mvg_model(mvg_model_to_json(g));
    CHECK(gb.mean == g.mean);
    CHECK(gb.cov == g.cov);
    CHECK(gb.n == 50);
    MvgModel asym = g;
    asym.cov(0, 1) += 1.0;
    CHECK_THROWS_AS(parse_mvg_model(mvg_model_to_json(asym)), std::runtime_error);
    MvgModel neg = g;
    neg.cov = -Eigen::MatrixXd::Identity(4, 4);
    CHECK_THROWS_AS(parse_mvg_model(mvg_model_to_json(neg)), std::runtime_error);
}

TEST_CASE("metric table csv round trip") {
    MetricTable t;
    t.image_ids = {"b", "a", "c"};
    t.patient_ids = {"p1", "p1", "p2"};
    t.metrics = {{"MSE", MetricClass::Pixel}, {"PSNR", MetricClass::Pixel}, {"custom", MetricClass::NoReference}};
    t.values.resize(3, 3);
    t.values << 0.1, 20.0, 1.0 / 3.0, 0.2, std::numeric_limits<double>::infinity(), -1.0, std::nan(""), 30.0, 5.0;
    t.missing_reasons[{2, 0}] = "no reference";
    const fs::path p = scratch("table.csv");
    write_metric_table_csv(p, t, "{\"seed\": 3}");

    std::ifstream in(p);
    std::string first;
    std::getline(in, first);
    CHECK(first == "# schema: iqa.metric_table.v1");

    const MetricTable back = read_metric_table_csv(p);
    CHECK(back.image_ids == t.image_ids);
    CHECK(back.patient_ids == t.patient_ids);
    CHECK(back.metrics[2].cls == MetricClass::NoReference);
    CHECK(back.values(0, 2) == 1.0 / 3.0);
    CHECK(std::isinf(back.values(1, 1)));
    CHECK(back.is_missing(2, 0));
    CHECK(back.missing_mask().count() == 1);

    const MetricTable sorted = t.sorted_by_id();
    CHECK(sorted.image_ids == std::vector<std::string>{"a", "b", "c"});
    CHECK(sorted.values(0, 0) == 0.2);
    CHECK(sorted.missing_reasons.at({2, 0}) == "no reference");

    MetricTable dup = t;
    dup.image_ids[1] = "b";
    CHECK_THROWS_AS(dup.validate(), std::invalid_argument);
    CHECK(metric_table_to_json(t).find("\"no reference\"") != std::string::npos);
    CHECK(standard_metric_class("RAPS-FD") == MetricClass::NoReference);
    CHECK(standard_metric_names().size() == 15);
}
