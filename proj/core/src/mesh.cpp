#include "nlcurv/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>

#include "nlcurv/errors.hpp"

namespace nlcurv {

void TriMesh::compute_vertex_normals() {
    vertex_normals.assign(vertices.size(), Vec(0, 0, 0));
    for (size_t t = 0; t < triangles.size(); ++t) {
        const auto& tri = triangles[t];
        Vec fn = face_normal(static_cast<int>(t)) * face_area(static_cast<int>(t));
        for (int k = 0; k < 3; ++k) vertex_normals[static_cast<size_t>(tri[static_cast<size_t>(k)])] += fn;
    }
    for (auto& nrm : vertex_normals) nrm = nrm.normalized();
}

bool TriMesh::consistently_oriented() const {
    // Directed edge (a,b) must appear at most once, and if (a,b) appears so
    // must (b,a) unless the edge is on the boundary.
    std::map<std::pair<int, int>, int> count;
    for (const auto& tri : triangles) {
        for (int k = 0; k < 3; ++k) {
            int a = tri[static_cast<size_t>(k)];
            int b = tri[static_cast<size_t>((k + 1) % 3)];
            if (++count[{a, b}] > 1) return false;
        }
    }
    return true;
}

double TriMesh::mean_edge_length() const {
    double s = 0.0;
    size_t m = 0;
    for (const auto& tri : triangles) {
        for (int k = 0; k < 3; ++k) {
            const Vec& a = vertices[static_cast<size_t>(tri[static_cast<size_t>(k)])];
            const Vec& b = vertices[static_cast<size_t>(tri[static_cast<size_t>((k + 1) % 3)])];
            s += (a - b).norm();
            ++m;
        }
    }
    return m ? s / static_cast<double>(m) : 0.0;
}

Vec TriMesh::face_normal(int t) const {
    const auto& tri = triangles[static_cast<size_t>(t)];
    const Vec& a = vertices[static_cast<size_t>(tri[0])];
    const Vec& b = vertices[static_cast<size_t>(tri[1])];
    const Vec& c = vertices[static_cast<size_t>(tri[2])];
    return (b - a).cross(c - a).normalized();
}

double TriMesh::face_area(int t) const {
    const auto& tri = triangles[static_cast<size_t>(t)];
    const Vec& a = vertices[static_cast<size_t>(tri[0])];
    const Vec& b = vertices[static_cast<size_t>(tri[1])];
    const Vec& c = vertices[static_cast<size_t>(tri[2])];
    return 0.5 * (b - a).cross(c - a).norm();
}

TriMesh load_off(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open mesh file: " + path);
    std::string tok;
    in >> tok;
    if (tok != "OFF") throw ConfigError("not an OFF file: " + path);
    size_t nv = 0, nf = 0, ne = 0;
    in >> nv >> nf >> ne;
    TriMesh mesh;
    mesh.vertices.reserve(nv);
    for (size_t i = 0; i < nv; ++i) {
        double x, y, z;
        in >> x >> y >> z;
        mesh.vertices.emplace_back(x, y, z);
    }
    for (size_t i = 0; i < nf; ++i) {
        int k;
        in >> k;
        if (k != 3) throw ConfigError("OFF loader supports triangles only");
        std::array<int, 3> tri{};
        in >> tri[0] >> tri[1] >> tri[2];
        mesh.triangles.push_back(tri);
    }
    if (!in) throw ConfigError("truncated OFF file: " + path);
    mesh.compute_vertex_normals();
    return mesh;
}

TriMesh load_obj(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open mesh file: " + path);
    TriMesh mesh;
    std::string line;
    auto face_index = [&](const std::string& f) {
        // "v", "v/vt", "v//vn", "v/vt/vn"
        int v = std::atoi(f.c_str());
        if (v < 0) v += static_cast<int>(mesh.vertices.size()) + 1;
        return v - 1;
    };
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        std::string kw;
        ls >> kw;
        if (kw == "v") {
            double x, y, z;
            ls >> x >> y >> z;
            mesh.vertices.emplace_back(x, y, z);
        } else if (kw == "f") {
            std::vector<int> idx;
            std::string f;
            while (ls >> f) idx.push_back(face_index(f));
            if (idx.size() != 3) throw ConfigError("OBJ loader supports triangles only");
            mesh.triangles.push_back({idx[0], idx[1], idx[2]});
        }
    }
    mesh.compute_vertex_normals();
    return mesh;
}

TriMesh load_mesh(const std::string& path) {
    auto dot = path.find_last_of('.');
    std::string ext = dot == std::string::npos ? "" : path.substr(dot + 1);
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    if (ext == "off") return load_off(path);
    if (ext == "obj") return load_obj(path);
    throw ConfigError("unsupported mesh format: " + path);
}

TriMesh make_icosphere(double radius, int level, const Vec& center) {
    const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
    std::vector<Vec> verts = {
        {-1, phi, 0}, {1, phi, 0}, {-1, -phi, 0}, {1, -phi, 0},
        {0, -1, phi}, {0, 1, phi}, {0, -1, -phi}, {0, 1, -phi},
        {phi, 0, -1}, {phi, 0, 1}, {-phi, 0, -1}, {-phi, 0, 1},
    };
    for (auto& v : verts) v = v.normalized();
    std::vector<std::array<int, 3>> faces = {
        {0, 11, 5}, {0, 5, 1}, {0, 1, 7}, {0, 7, 10}, {0, 10, 11},
        {1, 5, 9}, {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
        {3, 9, 4}, {3, 4, 2}, {3, 2, 6}, {3, 6, 8}, {3, 8, 9},
        {4, 9, 5}, {2, 4, 11}, {6, 2, 10}, {8, 6, 7}, {9, 8, 1},
    };
    std::map<std::pair<int, int>, int> midpoint;
    auto mid = [&](int a, int b) {
        auto key = std::minmax(a, b);
        auto it = midpoint.find(key);
        if (it != midpoint.end()) return it->second;
        Vec m = (verts[static_cast<size_t>(a)] + verts[static_cast<size_t>(b)]).normalized();
        verts.push_back(m);
        int idx = static_cast<int>(verts.size()) - 1;
        midpoint[key] = idx;
        return idx;
    };
    for (int l = 0; l < level; ++l) {
        std::vector<std::array<int, 3>> next;
        next.reserve(faces.size() * 4);
        for (const auto& f : faces) {
            int ab = mid(f[0], f[1]), bc = mid(f[1], f[2]), ca = mid(f[2], f[0]);
            next.push_back({f[0], ab, ca});
            next.push_back({f[1], bc, ab});
            next.push_back({f[2], ca, bc});
            next.push_back({ab, bc, ca});
        }
        faces.swap(next);
    }
    TriMesh mesh;
    mesh.vertices.reserve(verts.size());
    for (const auto& v : verts) mesh.vertices.push_back(center + v * radius);
    mesh.triangles = std::move(faces);
    mesh.vertex_normals = std::move(verts); // outward unit normals of the sphere
    return mesh;
}

TriMesh make_torus_mesh(double major_radius, double tube_radius, int nu, int nv) {
    constexpr double kTwoPi = 2.0 * std::numbers::pi;
    TriMesh mesh;
    mesh.vertices.reserve(static_cast<size_t>(nu) * static_cast<size_t>(nv));
    mesh.vertex_normals.reserve(mesh.vertices.capacity());
    for (int i = 0; i < nu; ++i) {
        double u = kTwoPi * i / nu; // around the hole
        for (int j = 0; j < nv; ++j) {
            double v = kTwoPi * j / nv; // around the tube
            double w = major_radius + tube_radius * std::cos(v);
            mesh.vertices.emplace_back(w * std::cos(u), w * std::sin(u), tube_radius * std::sin(v));
            mesh.vertex_normals.emplace_back(std::cos(v) * std::cos(u), std::cos(v) * std::sin(u), std::sin(v));
        }
    }
    auto at = [&](int i, int j) { return ((i % nu + nu) % nu) * nv + ((j % nv + nv) % nv); };
    for (int i = 0; i < nu; ++i) {
        for (int j = 0; j < nv; ++j) {
            int a = at(i, j), b = at(i + 1, j), c = at(i + 1, j + 1), d = at(i, j + 1);
            mesh.triangles.push_back({a, b, c});
            mesh.triangles.push_back({a, c, d});
        }
    }
    return mesh;
}

} // namespace nlcurv
