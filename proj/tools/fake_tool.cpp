// Stand-in compiler pipeline for hermetic tests: four pipeline roles plus a
// stock-level path, driven by the same command templates a real toolchain
// would use. Kernels are tiny directive files; "binaries" are shell scripts
// that print the kernel's values, with a cost sidecar the deterministic
// energy model reads. Poison passes simulate optimizer crashes (-fake-crash),
// hangs (-fake-hang), and miscompilation (-fake-perturb).

#include "phasex/errors.hpp"
#include "phasex/fnv.hpp"
#include "phasex/text_util.hpp"

#include <json.hpp>

#include <sys/stat.h>
#include <time.h>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using nlohmann::json;
using phasex::fnv1a64;
using phasex::parse_double;
using phasex::read_text_file;
using phasex::split_lines;
using phasex::split_ws;
using phasex::trim;
using phasex::write_text_file_atomic;

namespace {

[[noreturn]] void die(const std::string& msg) {
    std::cerr << "fake-tool: " << msg << "\n";
    std::exit(1);
}

struct Args {
    std::string role;
    std::string output;
    std::string level;
    bool openmp = false;
    std::vector<std::string> inputs;
    std::vector<std::string> passes; // dash tokens that are not recognized flags
};

Args parse_args(int argc, char** argv) {
    Args a;
    for (int i = 1; i < argc; ++i) {
        const std::string tok = argv[i];
        if (tok == "--role") {
            if (++i >= argc) die("--role needs a value");
            a.role = argv[i];
        } else if (tok == "-o") {
            if (++i >= argc) die("-o needs a value");
            a.output = argv[i];
        } else if (tok == "--openmp") {
            a.openmp = true;
        } else if (tok.rfind("-O", 0) == 0 && tok.size() == 3) {
            a.level = tok;
        } else if (!tok.empty() && tok[0] == '-') {
            a.passes.push_back(tok);
        } else {
            a.inputs.push_back(tok);
        }
    }
    if (a.role.empty()) die("--role is required");
    if (a.output.empty()) die("-o is required");
    return a;
}

// Directive-file kernel format, one "key: value" per line, '#' comments.
struct SourceDoc {
    std::string source_kind; // kernel | harness
    std::vector<double> values;
    double base_energy_j = 1.0;
    double base_time_ms = 100.0;
    std::map<std::string, double> level_factor{
        {"-O0", 1.0}, {"-O1", 0.85}, {"-O2", 0.75}, {"-O3", 0.7}};
    // threads -> (time factor, energy factor)
    std::map<std::string, std::pair<double, double>> thread_curve;
};

double need_double(const std::string& tok, const std::string& what) {
    const auto v = parse_double(tok);
    if (!v) die("bad number in " + what + ": '" + tok + "'");
    return *v;
}

SourceDoc parse_source(const fs::path& path) {
    SourceDoc doc;
    std::string text;
    try {
        text = read_text_file(path);
    } catch (const std::exception& e) {
        die(e.what());
    }
    for (const auto& raw : split_lines(text)) {
        const std::string line = trim(raw);
        if (line.empty() || line[0] == '#') continue;
        const auto colon = line.find(':');
        if (colon == std::string::npos) die("malformed line in " + path.string() + ": " + line);
        const std::string key = trim(line.substr(0, colon));
        const std::string value = trim(line.substr(colon + 1));
        if (key == "kind") {
            doc.source_kind = value;
        } else if (key == "values") {
            for (const auto& tok : split_ws(value))
                doc.values.push_back(need_double(tok, "values"));
        } else if (key == "base_energy_j") {
            doc.base_energy_j = need_double(value, "base_energy_j");
        } else if (key == "base_time_ms") {
            doc.base_time_ms = need_double(value, "base_time_ms");
        } else if (key == "level_factor") {
            doc.level_factor.clear();
            for (const auto& tok : split_ws(value)) {
                const auto eq = tok.find('=');
                if (eq == std::string::npos) die("bad level_factor entry: " + tok);
                doc.level_factor[tok.substr(0, eq)] =
                    need_double(tok.substr(eq + 1), "level_factor");
            }
        } else if (key == "thread_curve") {
            for (const auto& tok : split_ws(value)) {
                const auto eq = tok.find('=');
                const auto sep = tok.find(':', eq == std::string::npos ? 0 : eq);
                if (eq == std::string::npos || sep == std::string::npos)
                    die("bad thread_curve entry (want N=time:energy): " + tok);
                doc.thread_curve[tok.substr(0, eq)] = {
                    need_double(tok.substr(eq + 1, sep - eq - 1), "thread_curve"),
                    need_double(tok.substr(sep + 1), "thread_curve")};
            }
        } else {
            die("unknown directive '" + key + "' in " + path.string());
        }
    }
    if (doc.source_kind != "kernel" && doc.source_kind != "harness")
        die(path.string() + " needs 'kind: kernel' or 'kind: harness'");
    if (doc.source_kind == "kernel" && doc.values.empty())
        die(path.string() + " declares no values");
    return doc;
}

json source_to_ir(const SourceDoc& doc, bool openmp) {
    json j;
    j["kind"] = "ir";
    j["source_kind"] = doc.source_kind;
    j["openmp"] = openmp;
    j["optimized"] = false;
    j["perturbed"] = false;
    j["opt_state"] = "start";
    if (doc.source_kind == "kernel") {
        j["values"] = doc.values;
        j["base_energy_j"] = doc.base_energy_j;
        j["base_time_ms"] = doc.base_time_ms;
        json lf = json::object();
        for (const auto& [level, f] : doc.level_factor) lf[level] = f;
        j["level_factor"] = std::move(lf);
        json tc = json::object();
        for (const auto& [threads, te] : doc.thread_curve)
            tc[threads] = {{"time", te.first}, {"energy", te.second}};
        j["thread_curve"] = std::move(tc);
    }
    return j;
}

json load_doc(const fs::path& path, const char* expected_kind) {
    json j;
    try {
        j = json::parse(read_text_file(path));
    } catch (const std::exception& e) {
        die("cannot read " + path.string() + ": " + e.what());
    }
    if (j.value("kind", "") != expected_kind)
        die(path.string() + " is not a '" + expected_kind + "' artifact");
    return j;
}

void write_doc(const fs::path& path, const json& j) {
    try {
        write_text_file_atomic(path, j.dump(2) + "\n");
    } catch (const std::exception& e) {
        die(e.what());
    }
}

[[noreturn]] void hang_forever() {
    // Simulated optimizer non-termination; the driver's timeout reaps us.
    for (;;) {
        struct timespec ts{3600, 0};
        nanosleep(&ts, nullptr);
    }
}

std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void emit_binary(const fs::path& out, const json& kernel_doc, bool perturbed, double energy_j,
                 double time_ms, bool openmp) {
    std::string script = "#!/bin/sh\n";
    script += "# fake kernel binary";
    script += openmp ? " (openmp)\n" : "\n";
    script += "cat <<'EOF'\n";
    for (const auto& v : kernel_doc.at("values")) {
        double x = v.get<double>();
        if (perturbed) x += 0.01; // well past the correctness tolerance
        script += fmt17(x) + "\n";
    }
    script += "EOF\n";
    try {
        write_text_file_atomic(out, script);
    } catch (const std::exception& e) {
        die(e.what());
    }
    if (::chmod(out.c_str(), 0755) != 0) die("cannot chmod " + out.string());

    json cost;
    cost["energy_j"] = energy_j;
    cost["time_ms"] = time_ms;
    if (kernel_doc.contains("thread_curve")) cost["thread_curve"] = kernel_doc["thread_curve"];
    try {
        write_text_file_atomic(out.string() + ".cost", cost.dump(2) + "\n");
    } catch (const std::exception& e) {
        die(e.what());
    }
}

int run_frontend(const Args& a) {
    if (a.inputs.size() != 1) die("frontend needs exactly one input");
    const SourceDoc doc = parse_source(a.inputs[0]);
    write_doc(a.output, source_to_ir(doc, a.openmp));
    return 0;
}

int run_optimizer(const Args& a) {
    if (a.inputs.size() != 1) die("optimizer needs exactly one input");
    json ir = load_doc(a.inputs[0], "ir");
    if (ir.value("source_kind", "") != "kernel")
        die("optimizer got non-kernel IR; the harness must bypass it");
    std::string state = ir.value("opt_state", "start");
    for (const auto& pass : a.passes) {
        if (pass == "-fake-crash") die("simulated crash in pass " + pass);
        if (pass == "-fake-hang") hang_forever();
        if (pass == "-fake-perturb") {
            ir["perturbed"] = true;
            continue;
        }
        char folded[32];
        std::snprintf(folded, sizeof(folded), "%016llx",
                      static_cast<unsigned long long>(fnv1a64(state + "|" + pass)));
        state = folded;
    }
    ir["opt_state"] = state;
    ir["optimized"] = true;
    write_doc(a.output, ir);
    return 0;
}

int run_backend(const Args& a) {
    if (a.inputs.size() != 1) die("backend needs exactly one input");
    json ir = load_doc(a.inputs[0], "ir");
    ir["kind"] = "obj";
    write_doc(a.output, ir);
    return 0;
}

int run_linker(const Args& a) {
    if (a.inputs.size() != 2) die("linker needs exactly two inputs (kernel and harness objects)");
    json kernel, harness;
    for (const auto& input : a.inputs) {
        json obj = load_doc(input, "obj");
        const std::string sk = obj.value("source_kind", "");
        if (sk == "kernel")
            kernel = std::move(obj);
        else if (sk == "harness")
            harness = std::move(obj);
        else
            die("object with unknown source kind: " + input);
    }
    if (kernel.is_null() || harness.is_null())
        die("link needs one kernel object and one harness object");
    if (!kernel.value("optimized", false))
        die("kernel object skipped the optimizer");
    if (harness.value("optimized", false))
        die("harness object went through the optimizer; it must not");

    const bool openmp = a.openmp || kernel.value("openmp", false);
    const std::uint64_t h = fnv1a64(kernel.value("opt_state", "start"));
    double ft = 0.55 + static_cast<double>(h % 10000) / 10000.0 * 0.5;
    double fe = 0.55 + static_cast<double>((h / 10000) % 10000) / 10000.0 * 0.5;
    if (openmp) {
        fe *= 0.97;
        ft *= 1.01;
    }
    emit_binary(a.output, kernel, kernel.value("perturbed", false),
                kernel.at("base_energy_j").get<double>() * fe,
                kernel.at("base_time_ms").get<double>() * ft, openmp);
    return 0;
}

int run_standard(const Args& a) {
    if (a.inputs.size() != 2) die("standard build needs kernel and harness sources");
    if (a.level.empty()) die("standard build needs an -O level");
    SourceDoc kernel, harness;
    bool have_kernel = false, have_harness = false;
    for (const auto& input : a.inputs) {
        SourceDoc doc = parse_source(input);
        if (doc.source_kind == "kernel") {
            kernel = std::move(doc);
            have_kernel = true;
        } else {
            harness = std::move(doc);
            have_harness = true;
        }
    }
    if (!have_kernel || !have_harness) die("standard build needs one kernel and one harness");
    const auto it = kernel.level_factor.find(a.level);
    if (it == kernel.level_factor.end()) die("kernel declares no factor for level " + a.level);
    double fe = it->second, ft = it->second;
    if (a.openmp) {
        fe *= 0.97;
        ft *= 1.01;
    }
    emit_binary(a.output, source_to_ir(kernel, a.openmp), false, kernel.base_energy_j * fe,
                kernel.base_time_ms * ft, a.openmp);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    const Args a = parse_args(argc, argv);
    if (a.role == "frontend") return run_frontend(a);
    if (a.role == "optimizer") return run_optimizer(a);
    if (a.role == "backend") return run_backend(a);
    if (a.role == "linker") return run_linker(a);
    if (a.role == "standard") return run_standard(a);
    die("unknown role: " + a.role);
}
