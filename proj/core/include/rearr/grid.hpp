#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace rearr {

enum class DomainKind { Box, Ball, Mask };

/// Descriptor consumed by make_domain(). Cells are closed cubes of side
/// `spacing`; a cell belongs to the domain iff its center does.
struct DomainSpec {
    int dimension = 0;
    DomainKind kind = DomainKind::Box;
    double spacing = 0.0;
    // Per-axis spacings; if nonempty they must all be equal (isotropic grids
    // only) and override `spacing`.
    std::vector<double> spacings;

    // Box: per-axis intervals [lower, upper).
    std::vector<double> lower, upper;

    // Ball: radius, centered at the origin.
    double radius = 0.0;

    // Mask: row-major cell flags over `extents`, lower corner at `origin`
    // (defaults to 0).
    std::vector<std::int64_t> extents;
    std::vector<std::uint8_t> mask;
    std::vector<double> origin;

    static DomainSpec box(std::vector<double> lower, std::vector<double> upper, double spacing);
    static DomainSpec ball(int dimension, double radius, double spacing);
    static DomainSpec voxels(std::vector<std::int64_t> extents, std::vector<std::uint8_t> mask,
                             double spacing, std::vector<double> origin = {});
};

/// A bounded voxel domain: uniform lattice, boolean mask, exact measure
/// (cell count times h^n). Immutable after construction.
class Domain {
public:
    Domain() = default;

    int dimension() const { return dimension_; }
    DomainKind kind() const { return kind_; }
    double spacing() const { return spacing_; }
    double cell_volume() const { return cell_volume_; }
    double face_area() const { return face_area_; }
    /// |Omega| = interior cell count * h^n, exact by construction.
    double measure() const { return measure_; }

    const std::vector<std::int64_t>& extents() const { return extents_; }
    const std::vector<double>& origin() const { return origin_; }
    std::int64_t lattice_size() const { return lattice_size_; }
    std::int64_t cell_count() const { return static_cast<std::int64_t>(cells_.size()); }

    bool in_mask(std::int64_t lattice) const { return lattice_to_cell_[lattice] >= 0; }
    std::int64_t cell_of_lattice(std::int64_t lattice) const { return lattice_to_cell_[lattice]; }
    std::int64_t lattice_of_cell(std::int64_t cell) const { return cells_[cell]; }

    /// Lattice index of the axis-neighbor, or -1 when off the lattice.
    std::int64_t neighbor(std::int64_t lattice, int axis, int step) const;

    std::vector<double> cell_center(std::int64_t lattice) const;
    double cell_center_coord(std::int64_t lattice, int axis) const;

    bool same_layout(const Domain& other) const;

    friend Domain make_domain(const DomainSpec& spec);

private:
    int dimension_ = 0;
    DomainKind kind_ = DomainKind::Box;
    double spacing_ = 0.0;
    double cell_volume_ = 0.0;
    double face_area_ = 0.0;
    double measure_ = 0.0;
    std::vector<std::int64_t> extents_;
    std::vector<std::int64_t> strides_;
    std::vector<double> origin_;
    std::int64_t lattice_size_ = 0;
    std::vector<std::int64_t> cells_;            // cell -> lattice
    std::vector<std::int64_t> lattice_to_cell_;  // lattice -> cell or -1
};

Domain make_domain(const DomainSpec& spec);

/// Values of a function sampled at the centers of a domain's cells,
/// row-major over the lattice restricted to the mask. Immutable.
class GridFunction {
public:
    GridFunction(Domain domain, std::vector<double> values);

    const Domain& domain() const { return domain_; }
    double spacing() const { return domain_.spacing(); }
    std::span<const double> values() const { return values_; }
    double value(std::int64_t cell) const { return values_[cell]; }
    std::int64_t cell_count() const { return domain_.cell_count(); }

    double min_value() const;
    double max_value() const;

private:
    Domain domain_;
    std::vector<double> values_;
};

using PointFunction = std::function<double(const std::vector<double>&)>;

/// Evaluates f at every interior cell center. A non-finite sample raises
/// "singular sample".
GridFunction sample(const Domain& domain, const PointFunction& f);

/// RGRID v1 text format (see README). Values round-trip bit-for-bit.
GridFunction read_grid(const std::string& path);
void write_grid(const GridFunction& g, const std::string& path);

/// L^p norm of the sampled function (midpoint quadrature), p >= 1.
double grid_lp_norm(const GridFunction& g, double p);
double grid_l2_norm(const GridFunction& g);

}  // namespace rearr
