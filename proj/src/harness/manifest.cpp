#include "iqa/harness/manifest.hpp"

#include <json.hpp>

#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace iqa {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr const char* kSchema = "iqa.manifest.v1";

fs::path resolve(const fs::path& base, const std::string& p, const std::string& what) {
    if (p.empty()) throw std::runtime_error("manifest: empty path for " + what);
    fs::path out = fs::path(p).is_absolute() ? fs::path(p) : base / p;
    if (!fs::exists(out)) throw std::runtime_error("manifest: " + what + " not found: " + out.string());
    return out;
}

std::optional<fs::path> optional_path(const json& j, const char* key, const fs::path& base) {
    if (!j.contains(key) || j[key].is_null()) return std::nullopt;
    return resolve(base, j[key].get<std::string>(), key);
}

void only_keys(const json& j, const std::string& where, const std::set<std::string>& allowed) {
    if (!j.is_object()) throw std::runtime_error("manifest: '" + where + "' must be an object");
    for (const auto& [k, v] : j.items())
        if (!allowed.count(k)) throw std::runtime_error("manifest: unknown key '" + where + "." + k + "'");
}

}  // namespace

Manifest parse_manifest(const std::string& json_text, const fs::path& base_dir) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw std::runtime_error(std::string("manifest: malformed JSON: ") + e.what());
    }
    Manifest m;
    try {
        only_keys(j, "", {"schema", "entries", "embeddings", "external_scores", "models"});
        if (j.contains("schema") && j["schema"] != kSchema)
            throw std::runtime_error("manifest: unsupported schema " + j["schema"].dump());

        std::set<std::string> ids;
        for (const auto& e : j.value("entries", json::array())) {
            only_keys(e, "entries[]", {"image_id", "low_dose", "denoised", "reference", "patient_id"});
            ManifestEntry entry;
            entry.image_id = e.at("image_id").get<std::string>();
            if (entry.image_id.empty() || entry.image_id.find_first_of(",\n\r#") != std::string::npos)
                throw std::runtime_error("manifest: invalid image id '" + entry.image_id + "'");
            if (!ids.insert(entry.image_id).second)
                throw std::runtime_error("manifest: duplicate image id '" + entry.image_id + "'");
            const std::string tag = "'" + entry.image_id + "' ";
            entry.low_dose = resolve(base_dir, e.at("low_dose").get<std::string>(), tag + "low_dose");
            entry.denoised = resolve(base_dir, e.at("denoised").get<std::string>(), tag + "denoised");
            if (e.contains("reference") && !e["reference"].is_null())
                entry.reference = resolve(base_dir, e["reference"].get<std::string>(), tag + "reference");
            entry.patient_id = e.value("patient_id", std::string{});
            m.entries.push_back(std::move(entry));
        }
        if (j.contains("embeddings")) {
            const auto& e = j["embeddings"];
            only_keys(e, "embeddings", {"lpips1", "lpips2", "lpips3", "inception"});
            m.lpips1 = optional_path(e, "lpips1", base_dir);
            m.lpips2 = optional_path(e, "lpips2", base_dir);
            m.lpips3 = optional_path(e, "lpips3", base_dir);
            m.inception = optional_path(e, "inception", base_dir);
        }
        if (j.contains("external_scores")) {
            only_keys(j["external_scores"], "external_scores", {"paq2piq"});
            m.paq2piq_scores = optional_path(j["external_scores"], "paq2piq", base_dir);
        }
        if (j.contains("models")) {
            only_keys(j["models"], "models", {"brisque", "niqe"});
            m.brisque_model = optional_path(j["models"], "brisque", base_dir);
            m.niqe_model = optional_path(j["models"], "niqe", base_dir);
        }
    } catch (const json::exception& e) {
        throw std::runtime_error(std::string("manifest: ") + e.what());
    }
    return m;
}

Manifest load_manifest(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open manifest " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_manifest(ss.str(), path.parent_path());
}

std::string manifest_to_json(const Manifest& m) {
    json j;
    j["schema"] = kSchema;
    json entries = json::array();
    for (const auto& e : m.entries) {
        json x = {{"image_id", e.image_id}, {"low_dose", e.low_dose.string()}, {"denoised", e.denoised.string()}};
        if (e.reference) x["reference"] = e.reference->string();
        if (!e.patient_id.empty()) x["patient_id"] = e.patient_id;
        entries.push_back(x);
    }
    j["entries"] = entries;
    auto put = [](json& dst, const char* key, const std::optional<fs::path>& p) {
        if (p) dst[key] = p->string();
    };
    json emb = json::object(), scores = json::object(), models = json::object();
    put(emb, "lpips1", m.lpips1);
    put(emb, "lpips2", m.lpips2);
    put(emb, "lpips3", m.lpips3);
    put(emb, "inception", m.inception);
    put(scores, "paq2piq", m.paq2piq_scores);
    put(models, "brisque", m.brisque_model);
    put(models, "niqe", m.niqe_model);
    if (!emb.empty()) j["embeddings"] = emb;
    if (!scores.empty()) j["external_scores"] = scores;
    if (!models.empty()) j["models"] = models;
    return j.dump(2);
}

}  // namespace iqa
