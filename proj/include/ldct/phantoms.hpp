#pragma once

#include "ldct/image.hpp"
#include "ldct/random.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace ldct {

/// Linear attenuation coefficient of water at ~70 keV, 1/mm.
constexpr double kMuWaterPerMm = 0.0193;

inline double hu_to_mu(double hu) { return kMuWaterPerMm * (1.0 + hu / 1000.0); }
inline double mu_to_hu(double mu) { return 1000.0 * (mu - kMuWaterPerMm) / kMuWaterPerMm; }

/// Ellipse in unit field-of-view coordinates ([-1,1]^2, y up). Overlapping
/// ellipses add their values.
struct Ellipse {
    double value = 0.0;   // additive intensity (attenuation or HU delta)
    double a = 0.0;       // x semi-axis
    double b = 0.0;       // y semi-axis
    double x0 = 0.0;
    double y0 = 0.0;
    double phi_deg = 0.0; // rotation, counter-clockwise
};

struct EllipsePhantomSpec {
    std::vector<Ellipse> ellipses;
    double background = 0.0;
};

namespace detail {

inline double ellipse_sum(const EllipsePhantomSpec& spec, double x, double y) {
    double v = spec.background;
    for (const Ellipse& e : spec.ellipses) {
        const double phi = e.phi_deg * std::numbers::pi / 180.0;
        const double c = std::cos(phi), s = std::sin(phi);
        const double xr = (x - e.x0) * c + (y - e.y0) * s;
        const double yr = -(x - e.x0) * s + (y - e.y0) * c;
        if ((xr * xr) / (e.a * e.a) + (yr * yr) / (e.b * e.b) <= 1.0) v += e.value;
    }
    return v;
}

} // namespace detail

/// Rasterizes onto an n x n grid with 2x2 supersampling. Pixel (ix, iy)
/// covers unit coordinates centered at ((ix+0.5-n/2), (n/2-iy-0.5))/(n/2).
inline Image2D rasterize_ellipses(const EllipsePhantomSpec& spec, int n, double pixel_spacing) {
    if (n < 16) throw std::invalid_argument("rasterize_ellipses: grid must be at least 16");
    Image2D img(n, n, pixel_spacing);
    const double half = n / 2.0;
    const double sub = 0.25 / half; // quarter-pixel offset in unit coords
    for (int iy = 0; iy < n; ++iy) {
        const double v0 = (half - iy - 0.5) / half;
        for (int ix = 0; ix < n; ++ix) {
            const double u0 = (ix + 0.5 - half) / half;
            double acc = 0.0;
            acc += detail::ellipse_sum(spec, u0 - sub, v0 - sub);
            acc += detail::ellipse_sum(spec, u0 + sub, v0 - sub);
            acc += detail::ellipse_sum(spec, u0 - sub, v0 + sub);
            acc += detail::ellipse_sum(spec, u0 + sub, v0 + sub);
            img.at(ix, iy) = static_cast<float>(0.25 * acc);
        }
    }
    return img;
}

/// The standard 10-ellipse Shepp-Logan head phantom, values in [0,1].
inline EllipsePhantomSpec shepp_logan_spec() {
    EllipsePhantomSpec spec;
    spec.ellipses = {
        {1.00, 0.6900, 0.9200, 0.00, 0.0000, 0.0},
        {-0.98, 0.6624, 0.8740, 0.00, -0.0184, 0.0},
        {-0.02, 0.1100, 0.3100, 0.22, 0.0000, -18.0},
        {-0.02, 0.1600, 0.4100, -0.22, 0.0000, 18.0},
        {0.01, 0.2100, 0.2500, 0.00, 0.3500, 0.0},
        {0.01, 0.0460, 0.0460, 0.00, 0.1000, 0.0},
        {0.01, 0.0460, 0.0460, 0.00, -0.1000, 0.0},
        {0.01, 0.0460, 0.0230, -0.08, -0.6050, 0.0},
        {0.01, 0.0230, 0.0230, 0.00, -0.6060, 0.0},
        {0.01, 0.0230, 0.0460, 0.06, -0.6050, 0.0},
    };
    return spec;
}

inline Image2D shepp_logan(int n, double pixel_spacing = 0.5) {
    if (n < 16) throw std::invalid_argument("shepp_logan: grid must be at least 16");
    return rasterize_ellipses(shepp_logan_spec(), n, pixel_spacing);
}

/// Bar-group resolution phantom, HU values. One group per requested spatial
/// frequency; group g consists of n_cycles bright bars of width 10/(2g) mm
/// separated by equally wide background gaps, stacked as horizontal rows
/// inside a circular insert.
struct LinePairGroup {
    double lp_per_cm = 0.0;
    double bar_width_px = 0.0;
    // profile line through the bar centers, in pixel coordinates
    double x0 = 0, y0 = 0, x1 = 0, y1 = 0;
    int n_bars = 0;
};

struct LinePairModule {
    Image2D image;
    std::vector<LinePairGroup> groups;
};

inline LinePairModule line_pair_module(int n, const std::vector<double>& groups_lp_per_cm,
                                       double pixel_spacing, double background_hu = 40.0,
                                       double bar_hu = 380.0, int n_cycles = 5) {
    if (n < 16) throw std::invalid_argument("line_pair_module: grid must be at least 16");
    if (groups_lp_per_cm.empty())
        throw std::invalid_argument("line_pair_module: no groups requested");
    for (double g : groups_lp_per_cm) {
        const double bar_px = 10.0 / (2.0 * g) / pixel_spacing;
        if (bar_px < 1.0)
            throw std::invalid_argument("line_pair_module: group " + std::to_string(g) +
                                        " lp/cm needs bars of " + std::to_string(bar_px) +
                                        " px (< 1 px, unresolvable at spacing " +
                                        std::to_string(pixel_spacing) + " mm)");
    }

    LinePairModule mod;
    mod.image = Image2D(n, n, pixel_spacing, -1000.0f); // air outside the insert
    Image2D& img = mod.image;

    // circular insert of background material
    const double cx = (n - 1) / 2.0, cy = (n - 1) / 2.0;
    const double insert_r = 0.47 * n;
    for (int y = 0; y < n; ++y)
        for (int x = 0; x < n; ++x)
            if ((x - cx) * (x - cx) + (y - cy) * (y - cy) <= insert_r * insert_r)
                img.at(x, y) = static_cast<float>(background_hu);

    const int n_groups = static_cast<int>(groups_lp_per_cm.size());
    const double row_pitch = 2.0 * insert_r / (n_groups + 1);
    const double group_h = std::min(0.8 * row_pitch, 0.2 * n);

    for (int gi = 0; gi < n_groups; ++gi) {
        const double g = groups_lp_per_cm[gi];
        const double bar_px = 10.0 / (2.0 * g) / pixel_spacing;
        const double yc = cy - insert_r + (gi + 1) * row_pitch;
        const double span = (2.0 * n_cycles - 1) * bar_px;
        const double xs = cx - span / 2.0;

        // supersampled bar rasterization: 4 sub-positions per pixel along x
        const double y_lo = yc - group_h / 2.0, y_hi = yc + group_h / 2.0;
        for (int y = 0; y < n; ++y) {
            if (y + 0.5 < y_lo || y + 0.5 > y_hi) continue;
            for (int x = 0; x < n; ++x) {
                double cover = 0.0;
                for (int s = 0; s < 4; ++s) {
                    const double xp = x + (s + 0.5) / 4.0 - xs;
                    if (xp < 0.0 || xp > span) continue;
                    const int cell = static_cast<int>(xp / bar_px);
                    if (cell % 2 == 0) cover += 0.25; // even cells are bars
                }
                if (cover > 0.0)
                    img.at(x, y) = static_cast<float>(background_hu +
                                                      cover * (bar_hu - background_hu));
            }
        }

        LinePairGroup grp;
        grp.lp_per_cm = g;
        grp.bar_width_px = bar_px;
        grp.n_bars = n_cycles;
        // profile endpoints in pixel-center coordinates, one gap of margin
        grp.x0 = std::max(0.0, xs - bar_px - 0.5);
        grp.x1 = std::min(n - 1.0, xs + span + bar_px - 0.5);
        grp.y0 = grp.y1 = yc - 0.5; // along the bar-row center
        mod.groups.push_back(grp);
    }
    return mod;
}

struct RandomPhantomConfig {
    int min_ellipses = 3;
    int max_ellipses = 12;
    double min_delta_hu = 5.0;
    double max_delta_hu = 50.0;
    double background_hu = 40.0;
    bool body_outline = true;  // soft-tissue disk surrounded by air
    double clamp_min_hu = -1000.0;
    double clamp_max_hu = 400.0;
};

/// Deterministic per seed: low-contrast ellipses on a body-like background.
inline Image2D random_ellipse_phantom(std::uint64_t seed, int n, double pixel_spacing = 0.5,
                                      const RandomPhantomConfig& cfg = {}) {
    if (n < 16) throw std::invalid_argument("random_ellipse_phantom: grid must be at least 16");
    std::mt19937_64 eng = make_engine(seed, 0x7a11u);
    std::uniform_int_distribution<int> count_dist(cfg.min_ellipses, cfg.max_ellipses);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    EllipsePhantomSpec spec;
    if (cfg.body_outline) {
        spec.background = -1000.0; // air
        Ellipse body;
        body.value = cfg.background_hu + 1000.0;
        body.a = 0.80 + 0.15 * unit(eng);
        body.b = 0.80 + 0.15 * unit(eng);
        spec.ellipses.push_back(body);
    } else {
        spec.background = cfg.background_hu;
    }

    const int n_ell = count_dist(eng);
    for (int i = 0; i < n_ell; ++i) {
        Ellipse e;
        const double mag = cfg.min_delta_hu + (cfg.max_delta_hu - cfg.min_delta_hu) * unit(eng);
        e.value = (unit(eng) < 0.5) ? -mag : mag;
        e.a = 0.05 + 0.30 * unit(eng);
        e.b = 0.05 + 0.30 * unit(eng);
        const double r = 0.55 * unit(eng);
        const double th = 2.0 * std::numbers::pi * unit(eng);
        e.x0 = r * std::cos(th);
        e.y0 = r * std::sin(th);
        e.phi_deg = 180.0 * unit(eng);
        spec.ellipses.push_back(e);
    }

    Image2D img = rasterize_ellipses(spec, n, pixel_spacing);
    for (float& v : img.data)
        v = std::clamp(v, static_cast<float>(cfg.clamp_min_hu),
                       static_cast<float>(cfg.clamp_max_hu));
    return img;
}

} // namespace ldct
