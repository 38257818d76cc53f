#include "mfdirac/io.hpp"

#include <bit>
#include <fstream>
#include <stdexcept>

#include <fmt/format.h>
#include <fmt/os.h>
#include <json.hpp>

namespace mfd {

namespace {

fmt::ostream open_text(const std::filesystem::path& path) {
    return fmt::output_file(path.string());
}

std::string num(double x) { return fmt::format("{:.17g}", x); }

void require_little_endian() {
    if constexpr (std::endian::native != std::endian::little)
        throw std::runtime_error("snapshot io requires a little-endian host");
}

} // namespace

void write_sigma_csv(const std::filesystem::path& path, const SigmaCurve& curve) {
    auto out = open_text(path);
    out.print("omega,sigma,quad_error\n");
    for (std::size_t i = 0; i < curve.omega.size(); ++i)
        out.print("{},{},{}\n", num(curve.omega[i]), num(curve.sigma[i]),
                  num(curve.quadError[i]));
}

void write_atlas_csv(const std::filesystem::path& path, const ManifoldAtlas& atlas) {
    auto out = open_text(path);
    out.print("omega,sigma,sigma_error,branch,root_r,charge,residual\n");
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (const AtlasPoint& pt : atlas.points) {
        if (pt.branches.empty()) {
            out.print("{},{},{},-1,{},{},{}\n", num(pt.omega), num(pt.sigma),
                      num(pt.sigmaErr), num(nan), num(nan), num(nan));
            continue;
        }
        for (std::size_t b = 0; b < pt.branches.size(); ++b)
            out.print("{},{},{},{},{},{},{}\n", num(pt.omega), num(pt.sigma),
                      num(pt.sigmaErr), b, num(pt.branches[b].rootR),
                      num(pt.branches[b].charge), num(pt.branches[b].residual));
    }
}

void write_trajectory_csv(const std::filesystem::path& path, const TrajectoryRecord& rec) {
    auto out = open_text(path);
    out.print("t,re_y,im_y,charge,energy\n");
    for (std::size_t i = 0; i < rec.t.size(); ++i)
        out.print("{},{},{},{},{}\n", num(rec.t[i]), num(rec.y[i].real()),
                  num(rec.y[i].imag()), num(rec.charge[i]), num(rec.energy[i]));
}

void write_y_csv(const std::filesystem::path& path, const std::vector<double>& t,
                 const std::vector<cplx>& y) {
    auto out = open_text(path);
    out.print("t,re_y,im_y\n");
    for (std::size_t i = 0; i < t.size(); ++i)
        out.print("{},{},{}\n", num(t[i]), num(y[i].real()), num(y[i].imag()));
}

void write_distance_csv(const std::filesystem::path& path, const TrajectoryRecord& rec) {
    auto out = open_text(path);
    out.print("t,dist,omega\n");
    for (std::size_t i = 0; i < rec.distTime.size(); ++i)
        out.print("{},{},{}\n", num(rec.distTime[i]), num(rec.distToS[i]),
                  num(rec.distOmega[i]));
}

void write_spectrum_csv(const std::filesystem::path& path, const SpectrumResult& spec) {
    auto out = open_text(path);
    out.print("omega,density\n");
    for (std::size_t i = 0; i < spec.omega.size(); ++i)
        out.print("{},{}\n", num(spec.omega[i]), num(spec.density[i]));
}

void write_snapshot(const std::filesystem::path& path, const SpinorField& f, double m,
                    double time) {
    require_little_endian();
    nlohmann::json header = {
        {"format", "mfdirac-snapshot"},
        {"version", 1},
        {"N", f.grid.N},
        {"L", f.grid.L},
        {"m", m},
        {"time", time},
        {"space", f.space == Space::momentum ? "momentum" : "position"},
        {"count", f.data.size()},
        {"byte_order", "little"},
    };
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << header.dump() << '\n';
    out.write(reinterpret_cast<const char*>(f.data.data()),
              std::streamsize(f.data.size() * sizeof(cplx)));
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

Snapshot read_snapshot(const std::filesystem::path& path) {
    require_little_endian();
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("missing header in " + path.string());
    nlohmann::json header = nlohmann::json::parse(line);
    if (header.at("format") != "mfdirac-snapshot" || header.at("version") != 1)
        throw std::runtime_error("unrecognized snapshot format in " + path.string());
    if (header.at("byte_order") != "little")
        throw std::runtime_error("unsupported byte order in " + path.string());

    Snapshot snap;
    snap.m = header.at("m").get<double>();
    snap.time = header.at("time").get<double>();
    const FourierGrid grid =
        make_grid(header.at("N").get<int>(), header.at("L").get<double>(), snap.m);
    const std::string space = header.at("space").get<std::string>();
    if (space != "momentum" && space != "position")
        throw std::runtime_error("bad space field in " + path.string());
    snap.field = zero_field(grid, space == "momentum" ? Space::momentum : Space::position);
    if (header.at("count").get<std::size_t>() != snap.field.data.size())
        throw std::runtime_error("element count mismatch in " + path.string());
    in.read(reinterpret_cast<char*>(snap.field.data.data()),
            std::streamsize(snap.field.data.size() * sizeof(cplx)));
    if (in.gcount() != std::streamsize(snap.field.data.size() * sizeof(cplx)))
        throw std::runtime_error("truncated snapshot " + path.string());
    return snap;
}

} // namespace mfd
