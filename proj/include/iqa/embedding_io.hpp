#pragma once

// File formats consumed by the metrics: IQAE embeddings, external score CSVs,
// and the JSON model files for BRISQUE (SvrModel) and NIQE (MvgModel).

#include "iqa/no_reference.hpp"
#include "iqa/paired.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace iqa {

struct EmbeddingRecord {
    std::string image_id;
    std::string tensor;
    std::vector<std::uint32_t> dims;
    std::vector<float> values;  // row-major over dims
};

/// "IQAE": magic, u32 version, u32 record count, [v2: u32-prefixed JSON
/// metadata], then per record: u32-prefixed image id, u32-prefixed tensor
/// name, u32 rank, rank x u32 dims, little-endian f32 payload.
struct EmbeddingFile {
    std::uint32_t version = 1;
    std::string metadata;  // version 2 only
    std::vector<EmbeddingRecord> records;
};

EmbeddingFile read_iqae(std::istream& in);
EmbeddingFile read_iqae(const std::filesystem::path& path);
void write_iqae(std::ostream& out, const EmbeddingFile& file);
void write_iqae(const std::filesystem::path& path, const EmbeddingFile& file);

/// Role suffixes the exporter appends to manifest image ids.
inline std::string denoised_key(const std::string& id) { return id + "#denoised"; }
inline std::string reference_key(const std::string& id) { return id + "#reference"; }

/// Layers of `image_id` in file order. Rank-3 tensors are [channels, rows,
/// cols]; rank-2 tensors are a single-channel [rows, cols] map.
ActivationStack activation_stack(const EmbeddingFile& file, const std::string& image_id);

/// Rows of tensor `tensor` for `image_id`: a rank-2 [n, d] record, or rank-1
/// records stacked in file order. Throws if nothing matches.
Eigen::MatrixXd embedding_matrix(const EmbeddingFile& file, const std::string& image_id,
                                 const std::string& tensor);

/// Every row of tensor `tensor` in the file regardless of image id.
Eigen::MatrixXd embedding_pool(const EmbeddingFile& file, const std::string& tensor);

/// CSV "image_id,score" (an optional header row is skipped). Duplicate ids
/// and malformed rows throw; an empty file yields an empty map and a warning.
std::map<std::string, double> read_external_scores(const std::filesystem::path& path);
void write_external_scores(const std::filesystem::path& path, const std::map<std::string, double>& scores);

SvrModel parse_svr_model(const std::string& json_text);
SvrModel read_svr_model(const std::filesystem::path& path);
std::string svr_model_to_json(const SvrModel& model);

MvgModel parse_mvg_model(const std::string& json_text);
MvgModel read_mvg_model(const std::filesystem::path& path);
std::string mvg_model_to_json(const MvgModel& model);

}  // namespace iqa
