#include "iqa/harness/scoring.hpp"

#include "iqa/diagnostics.hpp"
#include "iqa/distribution.hpp"
#include "iqa/embedding_io.hpp"
#include "iqa/image_io.hpp"
#include "iqa/no_reference.hpp"
#include "iqa/paired.hpp"
#include "iqa/spectrum.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <exception>
#include <limits>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace iqa {

namespace fs = std::filesystem;

namespace {

std::string lower(std::string s) {
    for (auto& ch : s) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    return s;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return {};
    return s.substr(b, s.find_last_not_of(" \t") - b + 1);
}

bool is_lpips(const std::string& m) { return m == "LPIPS1" || m == "LPIPS2" || m == "LPIPS3"; }
bool is_inception(const std::string& m) { return m == "FID" || m == "KID" || m == "IS"; }

// Pixel metrics plus VIF read the reference raster; LPIPS works on exported
// activations but still needs the entry to have a reference.
bool needs_reference_image(const std::string& m) {
    return m == "MSE" || m == "PSNR" || m == "SSIM" || m == "VIF";
}

// Rows of `tensor` for every "<id>#reference" record, in file order.
Eigen::MatrixXd reference_pool(const EmbeddingFile& file, const std::string& tensor) {
    static const std::string suffix = reference_key("");
    std::set<std::string> seen;
    std::vector<Eigen::MatrixXd> parts;
    for (const auto& rec : file.records) {
        if (rec.tensor != tensor || rec.image_id.size() < suffix.size() ||
            rec.image_id.compare(rec.image_id.size() - suffix.size(), suffix.size(), suffix) != 0)
            continue;
        if (seen.insert(rec.image_id).second) parts.push_back(embedding_matrix(file, rec.image_id, tensor));
    }
    if (parts.empty()) throw std::runtime_error("inception embeddings hold no reference '" + tensor + "' rows");
    Eigen::Index rows = 0;
    for (const auto& p : parts) {
        if (p.cols() != parts[0].cols()) throw std::runtime_error("inception embeddings: ragged reference rows");
        rows += p.rows();
    }
    Eigen::MatrixXd out(rows, parts[0].cols());
    Eigen::Index at = 0;
    for (const auto& p : parts) {
        out.middleRows(at, p.rows()) = p;
        at += p.rows();
    }
    return out;
}

}  // namespace

class MetricResources {
public:
    std::map<std::string, EmbeddingFile> lpips;
    std::optional<EmbeddingFile> inception;
    Eigen::MatrixXd reference_rows;
    GaussianStats reference_stats;
    std::map<std::string, double> paq2piq;
    std::optional<SvrModel> brisque;
    std::optional<MvgModel> niqe;
};

std::vector<std::string> parse_metric_selection(const std::string& list) {
    std::set<std::string> wanted;
    std::stringstream ss(list);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        const auto key = lower(item);
        bool matched = false;
        for (const auto& name : standard_metric_names()) {
            const auto cls = *standard_metric_class(name);
            if (key == "all" || (key == "paired" && is_paired(cls)) || (key == "unpaired" && !is_paired(cls)) ||
                key == lower(name)) {
                wanted.insert(name);
                matched = true;
            }
        }
        if (!matched) throw std::invalid_argument("unknown metric '" + item + "'");
    }
    if (wanted.empty()) throw std::invalid_argument("empty metric selection");
    std::vector<std::string> out;
    for (const auto& name : standard_metric_names())
        if (wanted.count(name)) out.push_back(name);
    return out;
}

Image preprocess(const Image& img, const Config& config) {
    const Eigen::Index n = config.resize;
    auto sized = [&](const Image& x) {
        if (n <= 0 || (x.width() == n && x.height() == n)) return x;
        return resize_bilinear(x, n, n);
    };
    if (img.domain() == Domain::Normalized) return sized(img);
    if (config.resize_first) return window_normalize(sized(img), config.window);
    return sized(window_normalize(img, config.window));
}

ImageNeeds image_needs(const std::vector<std::string>& metrics) {
    ImageNeeds needs;
    for (const auto& m : metrics) {
        if (needs_reference_image(m)) needs.reference = needs.denoised = true;
        if (m == "SNR" || m == "BRISQUE" || m == "NIQE") needs.denoised = true;
        if (m == "RAPS-FD") needs.low_dose = needs.denoised = true;
    }
    return needs;
}

MetricScorer::MetricScorer(const Manifest& manifest, std::vector<std::string> metrics, Config config,
                           ImageLoader loader)
    : metrics_(std::move(metrics)),
      config_(std::move(config)),
      loader_(loader ? std::move(loader) : ImageLoader([](const fs::path& p) { return load_image(p); })),
      resources_(std::make_unique<MetricResources>()) {
    auto& r = *resources_;
    for (const auto& m : metrics_) {
        if (is_lpips(m)) {
            const auto& path = m == "LPIPS1" ? manifest.lpips1 : m == "LPIPS2" ? manifest.lpips2 : manifest.lpips3;
            if (!path) throw std::runtime_error(m + " selected but the manifest has no " + lower(m) + " embeddings");
            r.lpips.emplace(m, read_iqae(*path));
        } else if (is_inception(m) && !r.inception) {
            if (!manifest.inception)
                throw std::runtime_error(m + " selected but the manifest has no inception embeddings");
            r.inception = read_iqae(*manifest.inception);
        } else if (m == "PaQ-2-PiQ") {
            if (!manifest.paq2piq_scores)
                throw std::runtime_error("PaQ-2-PiQ selected but the manifest has no paq2piq score file");
            r.paq2piq = read_external_scores(*manifest.paq2piq_scores);
        } else if (m == "BRISQUE") {
            if (!manifest.brisque_model) throw std::runtime_error("BRISQUE selected but no brisque model is given");
            r.brisque = read_svr_model(*manifest.brisque_model);
        } else if (m == "NIQE") {
            if (!manifest.niqe_model) throw std::runtime_error("NIQE selected but no niqe model is given");
            r.niqe = read_mvg_model(*manifest.niqe_model);
        }
    }
    const bool needs_pool = std::any_of(metrics_.begin(), metrics_.end(),
                                        [](const std::string& m) { return m == "FID" || m == "KID"; });
    if (needs_pool) {
        r.reference_rows = reference_pool(*r.inception, "pool");
        r.reference_stats = gaussian_stats(r.reference_rows);
    }
}

MetricScorer::~MetricScorer() = default;

EntryImages MetricScorer::load(const ManifestEntry& entry) const {
    const auto needs = image_needs(metrics_);
    EntryImages out;
    auto fetch = [&](const fs::path& p) {
        try {
            return preprocess(loader_(p), config_);
        } catch (const std::exception& e) {
            throw std::runtime_error("image '" + entry.image_id + "': " + p.string() + ": " + e.what());
        }
    };
    if (needs.denoised) out.denoised = fetch(entry.denoised);
    if (needs.low_dose) out.low_dose = fetch(entry.low_dose);
    if (needs.reference && entry.reference) out.reference = fetch(*entry.reference);
    return out;
}

double MetricScorer::score(const std::string& m, const ManifestEntry& entry, const EntryImages& images) const {
    const auto& r = *resources_;
    const auto cls = standard_metric_class(m);
    if (!cls) throw std::invalid_argument("unknown metric '" + m + "'");
    if (is_paired(*cls) && !entry.reference) throw std::runtime_error("no reference image");

    if (needs_reference_image(m)) {
        const Image& y = *images.reference;
        const Image& y_hat = *images.denoised;
        if (m == "MSE") return mse(y_hat, y);
        if (m == "PSNR")
            return config_.psnr_peak_from_image ? psnr_image_peak(y_hat, y) : psnr(y_hat, y, config_.psnr_peak);
        if (m == "SSIM") return ssim(y_hat, y, config_.ssim);
        return vif(y, y_hat, config_.vif_scales);
    }
    if (is_lpips(m)) {
        const auto& file = r.lpips.at(m);
        return lpips(activation_stack(file, denoised_key(entry.image_id)),
                     activation_stack(file, reference_key(entry.image_id)));
    }
    if (m == "FID") {
        const auto rows = embedding_matrix(*r.inception, denoised_key(entry.image_id), "pool");
        return fid(gaussian_stats(rows), r.reference_stats);
    }
    if (m == "KID") {
        const auto rows = embedding_matrix(*r.inception, denoised_key(entry.image_id), "pool");
        KidParams p = config_.kid();
        p.subset_size = std::min({p.subset_size, rows.rows(), r.reference_rows.rows()});
        return kid(rows, r.reference_rows, p).mean;
    }
    if (m == "IS") return inception_score(embedding_matrix(*r.inception, denoised_key(entry.image_id), "softmax"));
    if (m == "SNR") {
        const auto [tissue, air] = default_snr_masks(*images.denoised, config_.snr);
        return snr(*images.denoised, tissue, air);
    }
    if (m == "BRISQUE") return brisque_score(brisque_features(*images.denoised, config_.mscn), *r.brisque);
    if (m == "NIQE") return niqe_score(niqe_patch_features(*images.denoised, config_.niqe()), *r.niqe);
    if (m == "RAPS-FD") return raps_fd(*images.low_dose, *images.denoised, config_.raps, config_.raps_embedding);
    if (m == "PaQ-2-PiQ") {
        const auto it = r.paq2piq.find(entry.image_id);
        if (it == r.paq2piq.end()) throw std::runtime_error("no PaQ-2-PiQ score for this image");
        return it->second;
    }
    throw std::invalid_argument("unhandled metric '" + m + "'");
}

MetricTable score_corpus(const Manifest& manifest, const std::vector<std::string>& metrics, const Config& config,
                         int jobs, const ImageLoader& loader) {
    if (jobs < 1) throw std::invalid_argument("jobs must be >= 1");
    MetricTable table;
    for (const auto& m : metrics) {
        const auto cls = standard_metric_class(m);
        if (!cls) throw std::invalid_argument("unknown metric '" + m + "'");
        table.metrics.push_back({m, *cls});
    }
    std::vector<const ManifestEntry*> entries;
    for (const auto& e : manifest.entries) entries.push_back(&e);
    std::sort(entries.begin(), entries.end(),
              [](const ManifestEntry* a, const ManifestEntry* b) { return a->image_id < b->image_id; });
    for (const auto* e : entries) {
        table.image_ids.push_back(e->image_id);
        table.patient_ids.push_back(e->patient_id);
    }
    const auto n = static_cast<Eigen::Index>(entries.size());
    const auto k = static_cast<Eigen::Index>(metrics.size());
    table.values = Eigen::MatrixXd::Constant(n, k, std::numeric_limits<double>::quiet_NaN());
    if (n == 0) {
        warn("empty manifest: the score table has no rows");
        return table;
    }

    const MetricScorer scorer(manifest, metrics, config, loader);
    std::vector<std::vector<std::string>> reasons(static_cast<std::size_t>(n), std::vector<std::string>(k));
    std::atomic<Eigen::Index> next{0};
    std::exception_ptr fatal;
    std::mutex fatal_mutex;

    auto work = [&] {
        for (Eigen::Index i = next++; i < n; i = next++) {
            {
                std::lock_guard lock(fatal_mutex);
                if (fatal) return;
            }
            const auto& entry = *entries[static_cast<std::size_t>(i)];
            try {
                const auto images = scorer.load(entry);
                for (Eigen::Index j = 0; j < k; ++j) {
                    try {
                        table.values(i, j) = scorer.score(metrics[static_cast<std::size_t>(j)], entry, images);
                    } catch (const std::exception& e) {
                        table.values(i, j) = std::numeric_limits<double>::quiet_NaN();
                        reasons[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = e.what();
                    }
                }
            } catch (...) {
                std::lock_guard lock(fatal_mutex);
                if (!fatal) fatal = std::current_exception();
                return;
            }
        }
    };
    const int workers = static_cast<int>(std::min<Eigen::Index>(jobs, n));
    if (workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }
    if (fatal) std::rethrow_exception(fatal);

    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < k; ++j) {
            auto& why = reasons[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
            // A score that came out NaN without an exception still gets a reason.
            if (std::isnan(table.values(i, j)) && why.empty()) why = "score is not a number";
            if (!why.empty()) table.missing_reasons[{i, j}] = why;
        }
    return table;
}

}  // namespace iqa
