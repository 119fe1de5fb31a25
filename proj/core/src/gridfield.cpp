#include "nlcurv/gridfield.hpp"

#include <cmath>
#include <cstdint>
#include <fstream>

#include <json.hpp>

#include "nlcurv/errors.hpp"

namespace nlcurv {

std::size_t GridField::nodes() const {
    std::size_t m = 1;
    for (int d = 0; d < n; ++d) m *= static_cast<std::size_t>(N);
    return m;
}

std::size_t GridField::idx(int i, int j, int k) const {
    std::size_t f = static_cast<std::size_t>(i);
    if (n >= 2) f += static_cast<std::size_t>(j) * static_cast<std::size_t>(N);
    if (n >= 3)
        f += static_cast<std::size_t>(k) * static_cast<std::size_t>(N) *
             static_cast<std::size_t>(N);
    return f;
}

Vec GridField::node_point(std::size_t flat) const {
    Vec p = Vec::zero(n);
    std::size_t rem = flat;
    for (int d = 0; d < n; ++d) {
        p[d] = coord(static_cast<int>(rem % static_cast<std::size_t>(N)));
        rem /= static_cast<std::size_t>(N);
    }
    return p;
}

double GridField::max_abs() const {
    double m = 0.0;
    for (double v : data) m = std::max(m, std::abs(v));
    return m;
}

double GridField::boundary_max_abs() const {
    double m = 0.0;
    const std::size_t total = nodes();
    for (std::size_t f = 0; f < total; ++f) {
        std::size_t rem = f;
        bool boundary = false;
        for (int d = 0; d < n; ++d) {
            if (rem % static_cast<std::size_t>(N) == 0) boundary = true;
            rem /= static_cast<std::size_t>(N);
        }
        if (!boundary) continue;
        for (int c = 0; c < ncomp; ++c) m = std::max(m, std::abs(at(f, c)));
    }
    return m;
}

GridField GridField::sample(int n, int N, double L, int ncomp, Decay decay,
                            const std::function<void(const Vec&, double*)>& f) {
    if (n < 1 || n > 3 || N < 2 || L <= 0.0 || ncomp < 1)
        throw ConfigError("bad GridField shape");
    GridField g;
    g.n = n;
    g.N = N;
    g.L = L;
    g.ncomp = ncomp;
    g.decay = decay;
    g.data.assign(g.nodes() * static_cast<std::size_t>(ncomp), 0.0);
    const std::size_t total = g.nodes();
    for (std::size_t flat = 0; flat < total; ++flat)
        f(g.node_point(flat), g.data.data() + flat * static_cast<std::size_t>(ncomp));
    return g;
}

namespace {
const char* decay_name(DecayClass c) {
    switch (c) {
        case DecayClass::gaussian: return "gaussian";
        case DecayClass::compact: return "compact";
        case DecayClass::algebraic: return "algebraic";
    }
    return "gaussian";
}
DecayClass decay_from_name(const std::string& s) {
    if (s == "gaussian") return DecayClass::gaussian;
    if (s == "compact") return DecayClass::compact;
    if (s == "algebraic") return DecayClass::algebraic;
    throw ConfigError("unknown decay class: " + s);
}
} // namespace

void GridField::save(const std::string& path_stem) const {
    {
        std::ofstream bin(path_stem + ".bin", std::ios::binary);
        if (!bin) throw ConfigError("cannot write " + path_stem + ".bin");
        // payload is raw little-endian float64; all supported targets are LE
        bin.write(reinterpret_cast<const char*>(data.data()),
                  static_cast<std::streamsize>(data.size() * sizeof(double)));
    }
    nlohmann::json j;
    j["n"] = n;
    j["N"] = N;
    j["L"] = L;
    j["ncomp"] = ncomp;
    j["decay"] = decay_name(decay.cls);
    j["decay_exponent"] = decay.exponent;
    j["count"] = data.size();
    std::ofstream js(path_stem + ".json");
    if (!js) throw ConfigError("cannot write " + path_stem + ".json");
    js << j.dump(2) << "\n";
}

GridField GridField::load(const std::string& path_stem) {
    std::ifstream js(path_stem + ".json");
    if (!js) throw ConfigError("cannot read " + path_stem + ".json");
    nlohmann::json j;
    js >> j;
    GridField g;
    g.n = j.at("n").get<int>();
    g.N = j.at("N").get<int>();
    g.L = j.at("L").get<double>();
    g.ncomp = j.at("ncomp").get<int>();
    g.decay.cls = decay_from_name(j.at("decay").get<std::string>());
    g.decay.exponent = j.at("decay_exponent").get<double>();
    const std::size_t count = j.at("count").get<std::size_t>();
    if (count != g.nodes() * static_cast<std::size_t>(g.ncomp))
        throw ConfigError("field payload size mismatch in " + path_stem);
    g.data.resize(count);
    std::ifstream bin(path_stem + ".bin", std::ios::binary);
    if (!bin) throw ConfigError("cannot read " + path_stem + ".bin");
    bin.read(reinterpret_cast<char*>(g.data.data()),
             static_cast<std::streamsize>(count * sizeof(double)));
    if (!bin) throw ConfigError("truncated payload in " + path_stem + ".bin");
    return g;
}

void GridField::export_csv_slice(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write " + path);
    out.precision(17);
    out << "x";
    if (n >= 2) out << ",y";
    for (int c = 0; c < ncomp; ++c) out << ",v" << c;
    out << "\n";
    const int k = (n == 3) ? N / 2 : 0;
    for (int j = 0; j < (n >= 2 ? N : 1); ++j) {
        for (int i = 0; i < N; ++i) {
            std::size_t f = idx(i, j, k);
            out << coord(i);
            if (n >= 2) out << "," << coord(j);
            for (int c = 0; c < ncomp; ++c) out << "," << at(f, c);
            out << "\n";
        }
    }
}

double l2_relative_error(const GridField& a, const GridField& b) {
    if (a.data.size() != b.data.size()) throw ConfigError("field shape mismatch");
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < a.data.size(); ++i) {
        double d = a.data[i] - b.data[i];
        num += d * d;
        den += b.data[i] * b.data[i];
    }
    return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

} // namespace nlcurv
