#pragma once

#include <cstddef>
#include <memory>
#include <vector>

#include "relkin/vec3.hpp"

namespace relkin {

enum class Interpolation { Trilinear, Tricubic };

/// Uniform Cartesian lattice on [-R, R]^3 with n (odd) cells per axis.
/// Active cells are those whose centre lies in the ball |p| <= R; grid
/// vectors are indexed over active cells only.
class VelocityGrid {
public:
    VelocityGrid(double radius, int n_per_axis);

    double radius() const { return radius_; }
    int n_per_axis() const { return n_; }
    double spacing() const { return h_; }
    double cell_volume() const { return h_ * h_ * h_; }
    double coord(int i) const { return (i - half_) * h_; }
    bool in_ball(int i, int j, int k) const;

    std::size_t size() const { return cells().centers.size(); }
    const std::vector<Vec3>& centers() const { return cells().centers; }
    const Vec3& center(std::size_t a) const { return cells().centers[a]; }
    /// Active index of lattice cell (i,j,k), or -1 if outside the lattice or ball.
    int index(int i, int j, int k) const;
    /// Lattice triple of active cell a.
    void lattice(std::size_t a, int& i, int& j, int& k) const;

    /// Trilinear interpolation of a grid vector at an arbitrary momentum;
    /// inactive or out-of-range corners contribute zero.
    double interpolate(const double* values, const Vec3& p) const;
    /// Tensor 4-point Lagrange interpolation, same zero extension.
    double interpolate_cubic(const double* values, const Vec3& p) const;
    double interpolate(const double* values, const Vec3& p, Interpolation kind) const {
        return kind == Interpolation::Tricubic ? interpolate_cubic(values, p) : interpolate(values, p);
    }

    /// Visits every ball cell centre in lattice order without materialising
    /// the active list (used for large quadrature grids).
    template <class F>
    void for_each_ball_cell(F&& f) const {
        for (int i = 0; i < n_; ++i)
            for (int j = 0; j < n_; ++j)
                for (int k = 0; k < n_; ++k)
                    if (in_ball(i, j, k)) f(Vec3{coord(i), coord(j), coord(k)});
    }

    bool same_as(const VelocityGrid& o) const { return radius_ == o.radius_ && n_ == o.n_; }

private:
    struct Cells {
        std::vector<Vec3> centers;
        std::vector<int> lookup;  // n^3 -> active index or -1
        std::vector<int> triples;  // 3 per active cell
    };
    const Cells& cells() const;

    double radius_;
    int n_;
    double h_;
    double half_;
    mutable std::shared_ptr<const Cells> cells_;
};

}  // namespace relkin
