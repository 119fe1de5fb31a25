#pragma once

#include <array>
#include <string>
#include <vector>

#include "nlcurv/vec.hpp"

namespace nlcurv {

/// Triangle mesh in R^3, counter-clockwise orientation = outward.
struct TriMesh {
    std::vector<Vec> vertices;
    std::vector<std::array<int, 3>> triangles;
    std::vector<Vec> vertex_normals; // unit; computed when absent from input

    /// Area-weighted face normals accumulated per vertex, then normalized.
    void compute_vertex_normals();

    /// True iff every interior edge is shared by exactly two triangles in
    /// opposite directions.
    bool consistently_oriented() const;

    double mean_edge_length() const;
    Vec face_normal(int t) const; // unit, from winding order
    double face_area(int t) const;
};

TriMesh load_off(const std::string& path);
TriMesh load_obj(const std::string& path);
TriMesh load_mesh(const std::string& path); // dispatches on extension

/// Subdivided icosahedron projected to the sphere; 20 * 4^level faces.
TriMesh make_icosphere(double radius, int level, const Vec& center = Vec(0, 0, 0));

/// Torus with major radius R, tube radius r, (nu x nv) parameter grid.
TriMesh make_torus_mesh(double major_radius, double tube_radius, int nu, int nv);

} // namespace nlcurv
