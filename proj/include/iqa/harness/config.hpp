#pragma once

// Run configuration: one JSON document ("iqa.config.v1") holding every
// tunable constant. Files may be partial; missing keys keep their defaults.

#include "iqa/distribution.hpp"
#include "iqa/image.hpp"
#include "iqa/no_reference.hpp"
#include "iqa/nss.hpp"
#include "iqa/paired.hpp"
#include "iqa/spectrum.hpp"
#include "iqa/stats.hpp"
#include "iqa/tree.hpp"

#include <cstdint>
#include <filesystem>
#include <string>

namespace iqa {

struct Config {
    std::uint64_t seed = 0;

    WindowSpec window;
    Eigen::Index resize = 256;  // 0 keeps the native size
    bool resize_first = false;  // resize before windowing instead of after

    Eigen::Index patch_size = 50;
    Eigen::Index patch_stride = 25;

    double psnr_peak = 2.0;
    bool psnr_peak_from_image = false;
    SsimParams ssim;
    int vif_scales = 4;

    MscnParams mscn;
    Eigen::Index niqe_patch = 96;
    double niqe_sharpness = 0.75;

    Eigen::Index kid_subset_size = 100;
    Eigen::Index kid_subsets = 10;

    RapsParams raps;
    CurveEmbedding raps_embedding = CurveEmbedding::LogPower;

    SnrMaskParams snr;

    TreeParams tree;
    int cv_folds = 10;
    bool by_patient = false;
    bool refit_final = false;

    StrengthEdges edges;

    NiqeParams niqe() const { return NiqeParams{niqe_patch, niqe_sharpness, mscn}; }
    KidParams kid() const { return KidParams{kid_subset_size, kid_subsets, seed}; }
    CvParams cv() const { return CvParams{cv_folds, seed, by_patient, refit_final, tree}; }
};

/// Overlays `json_text` on `base`. Unknown keys and out-of-range values throw
/// std::runtime_error.
Config parse_config(const std::string& json_text, const Config& base = {});
Config load_config(const std::filesystem::path& path, const Config& base = {});

/// Complete document, keys sorted; parse_config(config_to_json(c)) == c.
std::string config_to_json(const Config& c);

}  // namespace iqa
