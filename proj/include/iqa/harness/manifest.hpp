#pragma once

// Corpus manifest: the (low-dose x, denoised y_hat, reference y) triplets plus
// the externally produced embeddings, score files and models.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace iqa {

struct ManifestEntry {
    std::string image_id;
    std::filesystem::path low_dose;
    std::filesystem::path denoised;
    std::optional<std::filesystem::path> reference;
    std::string patient_id;
};

struct Manifest {
    std::vector<ManifestEntry> entries;
    // IQAE files; LPIPS files hold "<id>#denoised" / "<id>#reference" layer
    // stacks, the inception file "pool" and "softmax" rows per patch.
    std::optional<std::filesystem::path> lpips1, lpips2, lpips3, inception;
    std::optional<std::filesystem::path> paq2piq_scores;
    std::optional<std::filesystem::path> brisque_model, niqe_model;
};

/// Relative paths resolve against `base_dir`. Throws std::runtime_error on
/// schema violations, duplicate ids or files that do not exist.
Manifest parse_manifest(const std::string& json_text, const std::filesystem::path& base_dir);
Manifest load_manifest(const std::filesystem::path& path);
std::string manifest_to_json(const Manifest& m);

}  // namespace iqa
