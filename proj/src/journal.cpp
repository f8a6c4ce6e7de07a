#include "phasex/journal.hpp"

#include "phasex/errors.hpp"
#include "phasex/fnv.hpp"
#include "phasex/text_util.hpp"

#include <algorithm>
#include <fstream>

namespace phasex {

namespace fs = std::filesystem;
using nlohmann::json;

Journal::Journal(fs::path dir) : dir_(std::move(dir)) {
    std::error_code ec;
    fs::create_directories(dir_ / "records", ec);
    fs::create_directories(dir_ / "models", ec);
    fs::create_directories(dir_ / "results", ec);
    if (ec)
        throw Error("cannot create journal directory " + dir_.string() + ": " + ec.message());
}

bool Journal::empty() const {
    std::error_code ec;
    if (fs::exists(dir_ / "manifest.json", ec)) return false;
    for (const auto& e : fs::directory_iterator(dir_ / "records", ec)) {
        (void)e;
        return false;
    }
    return true;
}

void Journal::write_manifest(const json& manifest) {
    write_text_file_atomic(dir_ / "manifest.json", manifest.dump(2) + "\n");
}

std::optional<json> Journal::read_manifest() const {
    const fs::path p = dir_ / "manifest.json";
    if (!fs::exists(p)) return std::nullopt;
    try {
        return json::parse(read_text_file(p));
    } catch (const json::exception& e) {
        throw Error("corrupt manifest " + p.string() + ": " + e.what());
    }
}

std::string Journal::record_key(const EvaluationRecord& rec) {
    std::string canon = rec.kernel;
    canon += '\n';
    canon += rec.exec_label();
    canon += "\nreps=";
    canon += std::to_string(rec.reps);
    canon += '\n';
    if (!rec.level.empty()) {
        canon += "level:";
        canon += rec.level;
    } else {
        canon += "seq:";
        canon += join(rec.sequence, " ");
    }
    return fnv1a64_hex(canon);
}

fs::path Journal::record_path(const std::string& key) const {
    return dir_ / "records" / (key + ".json");
}

bool Journal::has(const std::string& key) const {
    return fs::exists(record_path(key));
}

void Journal::store(const std::string& key, const EvaluationRecord& rec) {
    write_text_file_atomic(record_path(key), rec.to_json().dump(2) + "\n");
    std::ofstream index(dir_ / "index.txt", std::ios::app);
    if (!index) throw Error("cannot append to journal index in " + dir_.string());
    index << key << '\n';
    index.flush();
    if (!index) throw Error("failed writing journal index in " + dir_.string());
}

EvaluationRecord Journal::load(const std::string& key) const {
    const fs::path p = record_path(key);
    try {
        return EvaluationRecord::from_json(json::parse(read_text_file(p)));
    } catch (const json::exception& e) {
        throw Error("corrupt record " + p.string() + ": " + e.what());
    }
}

std::vector<std::string> Journal::index_keys() const {
    const fs::path p = dir_ / "index.txt";
    if (!fs::exists(p)) return {};
    std::vector<std::string> keys;
    for (const auto& line : split_lines(read_text_file(p))) {
        const std::string t = trim(line);
        if (!t.empty()) keys.push_back(t);
    }
    return keys;
}

std::vector<EvaluationRecord> Journal::all_records() const {
    std::vector<fs::path> files;
    std::error_code ec;
    for (const auto& e : fs::directory_iterator(dir_ / "records", ec))
        if (e.path().extension() == ".json") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    std::vector<EvaluationRecord> out;
    out.reserve(files.size());
    for (const auto& f : files) {
        try {
            out.push_back(EvaluationRecord::from_json(json::parse(read_text_file(f))));
        } catch (const json::exception& e) {
            throw Error("corrupt record " + f.string() + ": " + e.what());
        }
    }
    return out;
}

void Journal::write_model(const std::string& kernel, const json& model) {
    write_text_file_atomic(dir_ / "models" / (kernel + ".json"), model.dump(2) + "\n");
}

std::optional<json> Journal::read_model(const std::string& kernel) const {
    const fs::path p = dir_ / "models" / (kernel + ".json");
    if (!fs::exists(p)) return std::nullopt;
    try {
        return json::parse(read_text_file(p));
    } catch (const json::exception& e) {
        throw Error("corrupt model " + p.string() + ": " + e.what());
    }
}

void Journal::write_result(const std::string& name, const json& doc) {
    write_text_file_atomic(dir_ / "results" / (name + ".json"), doc.dump(2) + "\n");
}

std::optional<json> Journal::read_result(const std::string& name) const {
    const fs::path p = dir_ / "results" / (name + ".json");
    if (!fs::exists(p)) return std::nullopt;
    try {
        return json::parse(read_text_file(p));
    } catch (const json::exception& e) {
        throw Error("corrupt result " + p.string() + ": " + e.what());
    }
}

} // namespace phasex
