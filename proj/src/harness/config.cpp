#include "iqa/harness/config.hpp"

#include <json.hpp>

#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace iqa {

using nlohmann::json;

namespace {

constexpr const char* kSchema = "iqa.config.v1";

void only_keys(const json& j, const std::string& where, const std::set<std::string>& allowed) {
    if (!j.is_object()) throw std::runtime_error("config: '" + where + "' must be an object");
    for (const auto& [k, v] : j.items())
        if (!allowed.count(k)) throw std::runtime_error("config: unknown key '" + where + "." + k + "'");
}

template <typename T>
void take(const json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

void require(bool ok, const std::string& what) {
    if (!ok) throw std::runtime_error("config: " + what);
}

}  // namespace

Config parse_config(const std::string& json_text, const Config& base) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw std::runtime_error(std::string("config: malformed JSON: ") + e.what());
    }
    Config c = base;
    try {
        only_keys(j, "",
                  {"schema", "seed", "preprocess", "patches", "psnr", "ssim", "vif", "nss", "kid", "raps", "snr",
                   "tree", "cv", "strength_edges"});
        if (j.contains("schema") && j["schema"] != kSchema)
            throw std::runtime_error("config: unsupported schema " + j["schema"].dump());
        take(j, "seed", c.seed);

        if (j.contains("preprocess")) {
            const auto& p = j["preprocess"];
            only_keys(p, "preprocess", {"window_center", "window_width", "resize", "resize_first"});
            take(p, "window_center", c.window.center);
            take(p, "window_width", c.window.width);
            take(p, "resize", c.resize);
            take(p, "resize_first", c.resize_first);
        }
        if (j.contains("patches")) {
            const auto& p = j["patches"];
            only_keys(p, "patches", {"size", "stride"});
            take(p, "size", c.patch_size);
            take(p, "stride", c.patch_stride);
        }
        if (j.contains("psnr")) {
            const auto& p = j["psnr"];
            only_keys(p, "psnr", {"peak", "peak_from_image"});
            take(p, "peak", c.psnr_peak);
            take(p, "peak_from_image", c.psnr_peak_from_image);
        }
        if (j.contains("ssim")) {
            const auto& p = j["ssim"];
            only_keys(p, "ssim", {"radius", "sigma", "k1", "k2", "dynamic_range"});
            take(p, "radius", c.ssim.window_radius);
            take(p, "sigma", c.ssim.window_sigma);
            take(p, "k1", c.ssim.k1);
            take(p, "k2", c.ssim.k2);
            take(p, "dynamic_range", c.ssim.dynamic_range);
        }
        if (j.contains("vif")) {
            only_keys(j["vif"], "vif", {"scales"});
            take(j["vif"], "scales", c.vif_scales);
        }
        if (j.contains("nss")) {
            const auto& p = j["nss"];
            only_keys(p, "nss", {"mscn_sigma", "mscn_radius", "stabilizer", "niqe_patch", "niqe_sharpness"});
            take(p, "mscn_sigma", c.mscn.sigma);
            take(p, "mscn_radius", c.mscn.radius);
            take(p, "stabilizer", c.mscn.stabilizer);
            take(p, "niqe_patch", c.niqe_patch);
            take(p, "niqe_sharpness", c.niqe_sharpness);
        }
        if (j.contains("kid")) {
            only_keys(j["kid"], "kid", {"subset_size", "subsets"});
            take(j["kid"], "subset_size", c.kid_subset_size);
            take(j["kid"], "subsets", c.kid_subsets);
        }
        if (j.contains("raps")) {
            const auto& p = j["raps"];
            only_keys(p, "raps", {"bins", "max_radius", "embedding"});
            take(p, "bins", c.raps.n_bins);
            take(p, "max_radius", c.raps.max_radius);
            if (p.contains("embedding")) {
                const auto e = p["embedding"].get<std::string>();
                if (e == "log")
                    c.raps_embedding = CurveEmbedding::LogPower;
                else if (e == "linear")
                    c.raps_embedding = CurveEmbedding::LinearPower;
                else
                    throw std::runtime_error("config: raps.embedding must be 'log' or 'linear'");
            }
        }
        if (j.contains("snr")) {
            only_keys(j["snr"], "snr", {"tissue_threshold", "corner"});
            take(j["snr"], "tissue_threshold", c.snr.tissue_threshold);
            take(j["snr"], "corner", c.snr.corner);
        }
        if (j.contains("tree")) {
            const auto& p = j["tree"];
            only_keys(p, "tree", {"max_depth", "min_samples_leaf", "min_impurity_decrease"});
            if (p.contains("max_depth"))
                c.tree.max_depth = p["max_depth"].is_null() ? TreeParams::unlimited : p["max_depth"].get<int>();
            take(p, "min_samples_leaf", c.tree.min_samples_leaf);
            take(p, "min_impurity_decrease", c.tree.min_impurity_decrease);
        }
        if (j.contains("cv")) {
            only_keys(j["cv"], "cv", {"folds", "by_patient", "refit_final"});
            take(j["cv"], "folds", c.cv_folds);
            take(j["cv"], "by_patient", c.by_patient);
            take(j["cv"], "refit_final", c.refit_final);
        }
        if (j.contains("strength_edges")) {
            const auto e = j["strength_edges"].get<std::vector<double>>();
            require(e.size() == 3, "strength_edges needs 3 values");
            c.edges = {e[0], e[1], e[2]};
        }
    } catch (const json::exception& e) {
        throw std::runtime_error(std::string("config: ") + e.what());
    }

    require(c.window.width > 0.0, "preprocess.window_width must be positive");
    require(c.resize >= 0, "preprocess.resize must be >= 0");
    require(c.patch_size >= 1 && c.patch_stride >= 1, "patch size and stride must be >= 1");
    require(c.psnr_peak > 0.0, "psnr.peak must be positive");
    require(c.ssim.c1() > 0.0 && c.ssim.c2() > 0.0 && c.ssim.window_radius >= 1, "invalid ssim constants");
    require(c.vif_scales >= 1, "vif.scales must be >= 1");
    require(c.kid_subset_size >= 2 && c.kid_subsets >= 1, "invalid kid subset settings");
    require(c.raps.n_bins >= 2 && c.raps.max_radius > 0.0, "invalid raps settings");
    require(c.tree.min_samples_leaf >= 1, "tree.min_samples_leaf must be >= 1");
    require(c.tree.max_depth >= 0 || c.tree.max_depth == TreeParams::unlimited, "tree.max_depth must be >= 0");
    require(c.cv_folds >= 2, "cv.folds must be >= 2");
    require(0.0 < c.edges.fair && c.edges.fair < c.edges.moderate && c.edges.moderate < c.edges.strong &&
                c.edges.strong <= 1.0,
            "strength_edges must increase within (0, 1]");
    return c;
}

Config load_config(const std::filesystem::path& path, const Config& base) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), base);
}

std::string config_to_json(const Config& c) {
    json j;
    j["schema"] = kSchema;
    j["seed"] = c.seed;
    j["preprocess"] = {{"window_center", c.window.center},
                       {"window_width", c.window.width},
                       {"resize", c.resize},
                       {"resize_first", c.resize_first}};
    j["patches"] = {{"size", c.patch_size}, {"stride", c.patch_stride}};
    j["psnr"] = {{"peak", c.psnr_peak}, {"peak_from_image", c.psnr_peak_from_image}};
    j["ssim"] = {{"radius", c.ssim.window_radius},
                 {"sigma", c.ssim.window_sigma},
                 {"k1", c.ssim.k1},
                 {"k2", c.ssim.k2},
                 {"dynamic_range", c.ssim.dynamic_range}};
    j["vif"] = {{"scales", c.vif_scales}};
    j["nss"] = {{"mscn_sigma", c.mscn.sigma},
                {"mscn_radius", c.mscn.radius},
                {"stabilizer", c.mscn.stabilizer},
                {"niqe_patch", c.niqe_patch},
                {"niqe_sharpness", c.niqe_sharpness}};
    j["kid"] = {{"subset_size", c.kid_subset_size}, {"subsets", c.kid_subsets}};
    j["raps"] = {{"bins", c.raps.n_bins},
                 {"max_radius", c.raps.max_radius},
                 {"embedding", c.raps_embedding == CurveEmbedding::LogPower ? "log" : "linear"}};
    j["snr"] = {{"tissue_threshold", c.snr.tissue_threshold}, {"corner", c.snr.corner}};
    j["tree"] = {{"max_depth", c.tree.max_depth == TreeParams::unlimited ? json(nullptr) : json(c.tree.max_depth)},
                 {"min_samples_leaf", c.tree.min_samples_leaf},
                 {"min_impurity_decrease", c.tree.min_impurity_decrease}};
    j["cv"] = {{"folds", c.cv_folds}, {"by_patient", c.by_patient}, {"refit_final", c.refit_final}};
    j["strength_edges"] = {c.edges.fair, c.edges.moderate, c.edges.strong};
    return j.dump();
}

}  // namespace iqa
