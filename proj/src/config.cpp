#include "mfdirac/config.hpp"

#include <fstream>
#include <set>
#include <stdexcept>

namespace mfd {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw std::invalid_argument("config: " + path + " " + what);
}

void check_keys(const json& j, const std::string& path, const std::set<std::string>& allowed) {
    if (!j.is_object()) fail(path, "must be an object");
    for (const auto& item : j.items())
        if (!allowed.count(item.key()))
            fail(path.empty() ? item.key() : path + "." + item.key(), "is not a recognized key");
}

double get_num(const json& j, const std::string& path) {
    if (!j.is_number()) fail(path, "must be a number");
    return j.get<double>();
}

int get_int(const json& j, const std::string& path) {
    if (!j.is_number_integer()) fail(path, "must be an integer");
    return j.get<int>();
}

bool get_bool(const json& j, const std::string& path) {
    if (!j.is_boolean()) fail(path, "must be a boolean");
    return j.get<bool>();
}

std::string get_str(const json& j, const std::string& path) {
    if (!j.is_string()) fail(path, "must be a string");
    return j.get<std::string>();
}

// complex values: plain number (real) or [re, im]
cplx get_cplx(const json& j, const std::string& path) {
    if (j.is_number()) return cplx{j.get<double>(), 0.0};
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
        return cplx{j[0].get<double>(), j[1].get<double>()};
    fail(path, "must be a number or [re, im]");
}

std::array<double, 3> get_vec3(const json& j, const std::string& path) {
    if (!j.is_array() || j.size() != 3) fail(path, "must be an array of 3 numbers");
    std::array<double, 3> v{};
    for (int i = 0; i < 3; ++i) v[i] = get_num(j[i], path);
    return v;
}

// spinor directions: index 0..3 (a basis vector) or an array of 4 entries
std::array<cplx, 4> get_dir(const json& j, const std::string& path) {
    std::array<cplx, 4> d{};
    if (j.is_number_integer()) {
        const int k = j.get<int>();
        if (k < 0 || k > 3) fail(path, "component index must be in 0..3");
        d[k] = cplx{1.0, 0.0};
        return d;
    }
    if (!j.is_array() || j.size() != 4) fail(path, "must be a component index or an array of 4");
    for (int i = 0; i < 4; ++i) d[i] = get_cplx(j[i], path);
    return d;
}

json dump_cplx(cplx z) { return json::array({z.real(), z.imag()}); }

json dump_dir(const std::array<cplx, 4>& d) {
    json out = json::array();
    for (const cplx& z : d) out.push_back(dump_cplx(z));
    return out;
}

GaussTerm parse_term(const json& j, const std::string& path) {
    check_keys(j, path, {"amplitude", "width", "direction"});
    GaussTerm t;
    if (j.contains("amplitude")) t.a = get_cplx(j["amplitude"], path + ".amplitude");
    if (j.contains("width")) t.w = get_num(j["width"], path + ".width");
    if (j.contains("direction")) t.dir = get_dir(j["direction"], path + ".direction");
    return t;
}

InitialBlock parse_initial(const json& j, const std::string& path) {
    InitialBlock ini;
    if (!j.is_object()) fail(path, "must be an object");
    if (!j.contains("type")) fail(path + ".type", "is required");
    ini.type = get_str(j["type"], path + ".type");

    if (ini.type == "solitary" || ini.type == "perturbed_solitary") {
        std::set<std::string> keys{"type", "omega", "branch", "phase"};
        if (ini.type == "perturbed_solitary") keys.insert("delta");
        check_keys(j, path, keys);
        if (j.contains("omega")) ini.omega = get_num(j["omega"], path + ".omega");
        if (j.contains("branch")) ini.branch = get_int(j["branch"], path + ".branch");
        if (j.contains("phase")) ini.phase = get_num(j["phase"], path + ".phase");
        if (j.contains("delta")) ini.delta = get_num(j["delta"], path + ".delta");
        if (ini.branch < 0) fail(path + ".branch", "must be nonnegative");
        if (ini.delta < 0.0) fail(path + ".delta", "must be nonnegative");
    } else if (ini.type == "packet") {
        check_keys(j, path, {"type", "amplitude", "width", "center", "k0", "direction"});
        if (j.contains("amplitude"))
            ini.packet.amplitude = get_cplx(j["amplitude"], path + ".amplitude");
        if (j.contains("width")) ini.packet.width = get_num(j["width"], path + ".width");
        if (j.contains("center")) ini.packet.center = get_vec3(j["center"], path + ".center");
        if (j.contains("k0")) ini.packet.k0 = get_vec3(j["k0"], path + ".k0");
        if (j.contains("direction")) ini.packet.dir = get_dir(j["direction"], path + ".direction");
    } else {
        fail(path + ".type", "must be solitary, perturbed_solitary, or packet");
    }
    return ini;
}

json dump_initial(const InitialBlock& ini) {
    json j;
    j["type"] = ini.type;
    if (ini.type == "packet") {
        j["amplitude"] = dump_cplx(ini.packet.amplitude);
        j["width"] = ini.packet.width;
        j["center"] = ini.packet.center;
        j["k0"] = ini.packet.k0;
        j["direction"] = dump_dir(ini.packet.dir);
    } else {
        j["omega"] = ini.omega;
        j["branch"] = ini.branch;
        j["phase"] = ini.phase;
        if (ini.type == "perturbed_solitary") j["delta"] = ini.delta;
    }
    return j;
}

void default_omega_grid(ExperimentBlock& exp, double m) {
    const bool atlasLike = exp.name == "atlas" || exp.name == "attract";
    if (exp.omegaCount < 0) exp.omegaCount = atlasLike ? 35 : 201;
    if (exp.omegaMin == 0.0 && exp.omegaMax == 0.0) {
        exp.omegaMax = atlasLike ? 0.85 * m : m;
        exp.omegaMin = -exp.omegaMax;
    }
}

ExperimentBlock parse_experiment(const json& j, double m) {
    ExperimentBlock exp;
    if (!j.is_object()) fail("experiment", "must be an object");
    if (!j.contains("name")) fail("experiment.name", "is required");
    exp.name = get_str(j["name"], "experiment.name");

    std::set<std::string> keys{"name"};
    if (exp.name == "sigma" || exp.name == "atlas") {
        keys.insert({"omega_min", "omega_max", "count"});
    } else if (exp.name == "evolve") {
        keys.insert({"initial"});
    } else if (exp.name == "attract") {
        keys.insert({"initial", "dist_stride", "windows", "gap_delta", "omega_min", "omega_max",
                     "count"});
    } else if (exp.name == "selftest") {
        keys.insert({"corrupt_beta"});
    } else {
        fail("experiment.name", "must be sigma, atlas, evolve, attract, or selftest");
    }
    check_keys(j, "experiment", keys);

    if (j.contains("omega_min")) exp.omegaMin = get_num(j["omega_min"], "experiment.omega_min");
    if (j.contains("omega_max")) exp.omegaMax = get_num(j["omega_max"], "experiment.omega_max");
    if (j.contains("count")) exp.omegaCount = get_int(j["count"], "experiment.count");
    if (j.contains("initial")) exp.initial = parse_initial(j["initial"], "experiment.initial");
    if (j.contains("dist_stride"))
        exp.distStride = get_int(j["dist_stride"], "experiment.dist_stride");
    if (j.contains("gap_delta")) exp.gapDelta = get_num(j["gap_delta"], "experiment.gap_delta");
    if (j.contains("corrupt_beta"))
        exp.corruptBeta = get_bool(j["corrupt_beta"], "experiment.corrupt_beta");
    if (j.contains("windows")) {
        const json& w = j["windows"];
        if (!w.is_array()) fail("experiment.windows", "must be an array of [t0, t1] pairs");
        for (std::size_t i = 0; i < w.size(); ++i) {
            const std::string path = "experiment.windows[" + std::to_string(i) + "]";
            if (!w[i].is_array() || w[i].size() != 2) fail(path, "must be [t0, t1]");
            const double t0 = get_num(w[i][0], path);
            const double t1 = get_num(w[i][1], path);
            if (!(t0 < t1)) fail(path, "needs t0 < t1");
            exp.windows.push_back({t0, t1});
        }
    }

    if (j.contains("count") && exp.omegaCount < 0)
        fail("experiment.count", "must be nonnegative");
    if (exp.omegaCount > 0 && !(exp.omegaMin <= exp.omegaMax))
        fail("experiment.omega_min", "must not exceed omega_max");
    if (exp.distStride < 0) fail("experiment.dist_stride", "must be nonnegative");
    if (exp.gapDelta < 0.0) fail("experiment.gap_delta", "must be nonnegative");

    default_omega_grid(exp, m);
    return exp;
}

json dump_experiment(const ExperimentBlock& exp) {
    json j;
    j["name"] = exp.name;
    if (exp.name == "sigma" || exp.name == "atlas" || exp.name == "attract") {
        j["omega_min"] = exp.omegaMin;
        j["omega_max"] = exp.omegaMax;
        j["count"] = exp.omegaCount;
    }
    if (exp.name == "evolve" || exp.name == "attract") j["initial"] = dump_initial(exp.initial);
    if (exp.name == "attract") {
        j["dist_stride"] = exp.distStride;
        j["gap_delta"] = exp.gapDelta;
        json w = json::array();
        for (const auto& pair : exp.windows) w.push_back(json::array({pair[0], pair[1]}));
        j["windows"] = w;
    }
    if (exp.name == "selftest") j["corrupt_beta"] = exp.corruptBeta;
    return j;
}

} // namespace

std::vector<double> RunConfig::omega_grid() const {
    ExperimentBlock exp = experiment;
    default_omega_grid(exp, m);
    std::vector<double> grid(exp.omegaCount);
    for (int i = 0; i < exp.omegaCount; ++i)
        grid[i] = exp.omegaCount == 1
                      ? exp.omegaMin
                      : exp.omegaMin + (exp.omegaMax - exp.omegaMin) * double(i) /
                                           double(exp.omegaCount - 1);
    return grid;
}

RunConfig RunConfig::defaults(const std::string& experimentName) {
    RunConfig cfg;
    cfg.couplingTerms = normalized_gaussian(cfg.m).terms();
    cfg.experiment.name = experimentName;
    if (experimentName == "attract") cfg.time.T = 50.0;
    if (experimentName == "evolve") cfg.time.T = 20.0;
    default_omega_grid(cfg.experiment, cfg.m);
    return cfg;
}

RunConfig RunConfig::from_json(const nlohmann::json& doc) {
    RunConfig cfg;
    check_keys(doc, "", {"model", "grid", "time", "experiment", "engine", "seed", "output_dir",
                         "tolerances"});

    if (doc.contains("model")) {
        const json& mj = doc["model"];
        check_keys(mj, "model", {"m", "potential", "coupling"});
        if (mj.contains("m")) cfg.m = get_num(mj["m"], "model.m");
        if (!(cfg.m > 0.0)) fail("model.m", "must be positive");
        if (mj.contains("potential")) {
            if (!mj["potential"].is_array()) fail("model.potential", "must be an array");
            cfg.potential.clear();
            for (std::size_t i = 0; i < mj["potential"].size(); ++i)
                cfg.potential.push_back(get_num(mj["potential"][i],
                                                "model.potential[" + std::to_string(i) + "]"));
        }
        if (mj.contains("coupling")) {
            if (!mj["coupling"].is_array()) fail("model.coupling", "must be an array");
            for (std::size_t i = 0; i < mj["coupling"].size(); ++i)
                cfg.couplingTerms.push_back(parse_term(
                    mj["coupling"][i], "model.coupling[" + std::to_string(i) + "]"));
        }
    }
    if (cfg.couplingTerms.empty()) cfg.couplingTerms = normalized_gaussian(cfg.m).terms();

    if (doc.contains("grid")) {
        const json& gj = doc["grid"];
        check_keys(gj, "grid", {"N", "L"});
        if (gj.contains("N")) cfg.N = get_int(gj["N"], "grid.N");
        if (gj.contains("L")) cfg.L = get_num(gj["L"], "grid.L");
    }

    if (doc.contains("time")) {
        const json& tj = doc["time"];
        check_keys(tj, "time", {"dt", "T", "record_stride", "snapshot_stride", "substeps"});
        if (tj.contains("dt")) cfg.time.dt = get_num(tj["dt"], "time.dt");
        if (tj.contains("T")) cfg.time.T = get_num(tj["T"], "time.T");
        if (tj.contains("record_stride"))
            cfg.time.recordStride = get_int(tj["record_stride"], "time.record_stride");
        if (tj.contains("snapshot_stride"))
            cfg.time.snapshotStride = get_int(tj["snapshot_stride"], "time.snapshot_stride");
        if (tj.contains("substeps")) cfg.time.substeps = get_int(tj["substeps"], "time.substeps");
        if (!(cfg.time.dt > 0.0)) fail("time.dt", "must be positive");
        if (!(cfg.time.T > 0.0)) fail("time.T", "must be positive");
        if (cfg.time.recordStride < 1) fail("time.record_stride", "must be at least 1");
        if (cfg.time.snapshotStride < 0) fail("time.snapshot_stride", "must be nonnegative");
        if (cfg.time.substeps < 2 || cfg.time.substeps % 2 != 0)
            fail("time.substeps", "must be even and at least 2");
    }

    if (doc.contains("engine")) {
        cfg.engine = get_str(doc["engine"], "engine");
        if (cfg.engine != "spectral" && cfg.engine != "volterra" && cfg.engine != "both")
            fail("engine", "must be spectral, volterra, or both");
    }
    if (doc.contains("seed")) {
        if (!doc["seed"].is_number_integer() || doc["seed"].get<std::int64_t>() < 0)
            fail("seed", "must be a nonnegative integer");
        cfg.seed = doc["seed"].get<std::uint64_t>();
    }
    if (doc.contains("output_dir")) cfg.outputDir = get_str(doc["output_dir"], "output_dir");

    if (doc.contains("tolerances")) {
        const json& oj = doc["tolerances"];
        check_keys(oj, "tolerances", {"sigma_quad", "kernel", "engine_gap"});
        if (oj.contains("sigma_quad"))
            cfg.tolerances.sigmaQuad = get_num(oj["sigma_quad"], "tolerances.sigma_quad");
        if (oj.contains("kernel")) cfg.tolerances.kernel = get_num(oj["kernel"], "tolerances.kernel");
        if (oj.contains("engine_gap"))
            cfg.tolerances.engineGap = get_num(oj["engine_gap"], "tolerances.engine_gap");
        if (!(cfg.tolerances.sigmaQuad > 0.0)) fail("tolerances.sigma_quad", "must be positive");
        if (!(cfg.tolerances.kernel > 0.0)) fail("tolerances.kernel", "must be positive");
        if (!(cfg.tolerances.engineGap > 0.0)) fail("tolerances.engine_gap", "must be positive");
    }

    if (doc.contains("experiment")) cfg.experiment = parse_experiment(doc["experiment"], cfg.m);

    // surface module-level rejections (potential shape, empty coupling,
    // Nyquist corner rule) as load-time config errors
    cfg.potential_terms();
    cfg.coupling();
    cfg.grid();
    return cfg;
}

RunConfig RunConfig::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config: cannot open " + path.string());
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument("config: " + path.string() + " is not valid JSON: " + e.what());
    }
    return from_json(doc);
}

nlohmann::json RunConfig::to_json() const {
    nlohmann::json doc;
    doc["model"]["m"] = m;
    doc["model"]["potential"] = potential;
    nlohmann::json terms = nlohmann::json::array();
    for (const GaussTerm& t : couplingTerms) {
        nlohmann::json tj;
        tj["amplitude"] = dump_cplx(t.a);
        tj["width"] = t.w;
        tj["direction"] = dump_dir(t.dir);
        terms.push_back(tj);
    }
    doc["model"]["coupling"] = terms;
    doc["grid"]["N"] = N;
    doc["grid"]["L"] = L;
    doc["time"]["dt"] = time.dt;
    doc["time"]["T"] = time.T;
    doc["time"]["record_stride"] = time.recordStride;
    doc["time"]["snapshot_stride"] = time.snapshotStride;
    doc["time"]["substeps"] = time.substeps;
    if (!experiment.name.empty()) doc["experiment"] = dump_experiment(experiment);
    doc["engine"] = engine;
    doc["seed"] = seed;
    doc["output_dir"] = outputDir;
    doc["tolerances"]["sigma_quad"] = tolerances.sigmaQuad;
    doc["tolerances"]["kernel"] = tolerances.kernel;
    doc["tolerances"]["engine_gap"] = tolerances.engineGap;
    return doc;
}

void RunConfig::save(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << to_json().dump(2) << '\n';
}

} // namespace mfd
