#pragma once

#include "ldct/image.hpp"
#include "ldct/image_io.hpp"
#include "ldct/phantoms.hpp"
#include "ldct/random.hpp"

#include <unsupported/Eigen/FFT>

#include <cmath>
#include <complex>
#include <cstring>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace ldct {

/// Equiangular fan-beam geometry; views cover [0, 2*pi).
struct FanBeamGeometry {
    int n_detectors = 0;
    int n_views = 0;
    double source_to_axis = 0.0;     // mm
    double source_to_detector = 0.0; // mm
    double detector_arc = 0.0;       // full angular span of the bank, radians

    double delta_gamma() const { return detector_arc / n_detectors; }
    /// Fan angle of detector d (offset-center sampling).
    double gamma(int d) const { return (d + 0.5 - n_detectors / 2.0) * delta_gamma(); }
    double view_angle(int v) const { return 2.0 * std::numbers::pi * v / n_views; }

    void validate() const {
        if (n_detectors < 3) throw std::invalid_argument("FanBeamGeometry: need >= 3 detectors");
        if (n_views < 4) throw std::invalid_argument("FanBeamGeometry: need >= 4 views");
        if (!(source_to_detector > source_to_axis && source_to_axis > 0.0))
            throw std::invalid_argument(
                "FanBeamGeometry: require source_to_detector > source_to_axis > 0");
        if (!(detector_arc > 0.0 && detector_arc < std::numbers::pi))
            throw std::invalid_argument("FanBeamGeometry: detector_arc out of (0, pi)");
    }

    /// Radius of the circle guaranteed to be sampled by every view.
    double fov_radius() const {
        const double gamma_edge = detector_arc / 2.0 - delta_gamma() / 2.0;
        return source_to_axis * std::sin(gamma_edge);
    }

    bool operator==(const FanBeamGeometry&) const = default;
};

/// Reasonable desk-scale geometry for an n x n image at the given spacing:
/// 1.5n detectors, 2n views, source at 2.5x the circumscribed-circle radius.
inline FanBeamGeometry make_desk_geometry(int img_n, double pixel_spacing) {
    const double r_img = 0.5 * pixel_spacing * img_n * std::numbers::sqrt2;
    FanBeamGeometry g;
    g.n_detectors = (3 * img_n) / 2;
    g.n_views = 2 * img_n;
    g.source_to_axis = 2.5 * r_img;
    g.source_to_detector = 5.0 * r_img;
    g.detector_arc = 2.2 * std::asin(r_img / g.source_to_axis);
    return g;
}

/// Line-integral data, views x detectors, unitless attenuation*length.
struct Sinogram {
    FanBeamGeometry geometry;
    std::vector<float> data; // row-major, n_views rows of n_detectors

    Sinogram() = default;
    explicit Sinogram(const FanBeamGeometry& g, float fill = 0.0f)
        : geometry(g),
          data(static_cast<std::size_t>(g.n_views) * g.n_detectors, fill) {}

    float& at(int view, int det) {
        return data[static_cast<std::size_t>(view) * geometry.n_detectors + det];
    }
    float at(int view, int det) const {
        return data[static_cast<std::size_t>(view) * geometry.n_detectors + det];
    }

    void validate() const {
        geometry.validate();
        if (data.size() != static_cast<std::size_t>(geometry.n_views) * geometry.n_detectors)
            throw std::invalid_argument("Sinogram: data length does not match geometry");
        for (float v : data)
            if (!std::isfinite(v)) throw std::invalid_argument("Sinogram: non-finite entry");
    }
};

/// Quantum + electronic noise model: N ~ Poisson(n0*exp(-y)) + Gaussian(0, sigma_e^2).
struct NoiseModelParams {
    double n0 = 1e5;      // blank-scan photon flux
    double sigma_e = 0.0; // electronic-noise std, photons
    std::uint64_t seed = 0;

    void validate() const {
        if (!(n0 > 0.0)) throw std::invalid_argument("NoiseModelParams: n0 must be > 0");
        if (sigma_e < 0.0) throw std::invalid_argument("NoiseModelParams: sigma_e must be >= 0");
    }
};

namespace detail {

struct RaySampler {
    const Image2D* img;
    double half_w, half_h, spacing;

    explicit RaySampler(const Image2D& image)
        : img(&image),
          half_w(image.width / 2.0),
          half_h(image.height / 2.0),
          spacing(image.pixel_spacing) {}

    /// Bilinear sample at world (x, y) mm; zero outside the image.
    double sample(double wx, double wy) const {
        // world -> continuous pixel coords (pixel centers at integer coords)
        const double px = wx / spacing + half_w - 0.5;
        const double py = half_h - wy / spacing - 0.5;
        const int x0 = static_cast<int>(std::floor(px));
        const int y0 = static_cast<int>(std::floor(py));
        const double fx = px - x0, fy = py - y0;
        double v = 0.0;
        for (int dy = 0; dy <= 1; ++dy)
            for (int dx = 0; dx <= 1; ++dx) {
                const int x = x0 + dx, y = y0 + dy;
                if (x < 0 || y < 0 || x >= img->width || y >= img->height) continue;
                const double w = (dx ? fx : 1.0 - fx) * (dy ? fy : 1.0 - fy);
                v += w * img->at(x, y);
            }
        return v;
    }
};

} // namespace detail

/// Line integrals along every (view, detector) ray; linear in the image.
/// Sampling step is half a pixel with midpoint quadrature.
inline Sinogram forward_project(const Image2D& img, const FanBeamGeometry& geom) {
    geom.validate();
    img.validate();
    const double r_img =
        0.5 * img.pixel_spacing * std::hypot(double(img.width), double(img.height));
    if (r_img > geom.fov_radius())
        throw std::invalid_argument("forward_project: image circumscribed circle (r=" +
                                    std::to_string(r_img) + " mm) exceeds scan FOV (r=" +
                                    std::to_string(geom.fov_radius()) + " mm)");

    Sinogram sino(geom);
    const detail::RaySampler sampler(img);
    const double step = 0.5 * img.pixel_spacing;

#pragma omp parallel for schedule(static)
    for (int v = 0; v < geom.n_views; ++v) {
        const double beta = geom.view_angle(v);
        const double sx = geom.source_to_axis * std::cos(beta);
        const double sy = geom.source_to_axis * std::sin(beta);
        // central ray direction points from the source through the axis
        const double cx = -std::cos(beta), cy = -std::sin(beta);
        for (int d = 0; d < geom.n_detectors; ++d) {
            const double g = geom.gamma(d);
            const double cg = std::cos(g), sg = std::sin(g);
            const double ux = cx * cg - cy * sg;
            const double uy = cx * sg + cy * cg;
            // chord of the circumscribed circle: |S + t u|^2 = r_img^2
            const double b = sx * ux + sy * uy;
            const double c = sx * sx + sy * sy - r_img * r_img;
            const double disc = b * b - c;
            if (disc <= 0.0) continue;
            const double t0 = -b - std::sqrt(disc);
            const double t1 = -b + std::sqrt(disc);
            const int n_steps = std::max(1, static_cast<int>(std::ceil((t1 - t0) / step)));
            const double dt = (t1 - t0) / n_steps;
            double acc = 0.0;
            for (int i = 0; i < n_steps; ++i) {
                const double t = t0 + (i + 0.5) * dt;
                acc += sampler.sample(sx + t * ux, sy + t * uy);
            }
            sino.at(v, d) = static_cast<float>(acc * dt);
        }
    }
    return sino;
}

/// Draws the detected photon count for one post-log value y. Exposed so the
/// Monte-Carlo statistics of the model can be checked directly.
inline double sample_detector_count(double y, const NoiseModelParams& p, std::mt19937_64& eng) {
    const double lambda = p.n0 * std::exp(-y);
    double n = 0.0;
    if (lambda > 0.0) {
        std::poisson_distribution<long long> poisson(lambda);
        n = static_cast<double>(poisson(eng));
    }
    if (p.sigma_e > 0.0) {
        std::normal_distribution<double> gauss(0.0, p.sigma_e);
        n += gauss(eng);
    }
    return n;
}

/// Per-entry noise injection followed by the post-log transform
/// y_hat = -ln(max(N, 1)/n0). Each entry draws from its own derived RNG
/// stream, so the result is seed-deterministic regardless of thread count.
inline Sinogram inject_low_dose_noise(const Sinogram& sino, const NoiseModelParams& p) {
    p.validate();
    sino.validate();
    Sinogram out(sino.geometry);
    const std::int64_t total = static_cast<std::int64_t>(sino.data.size());
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < total; ++i) {
        std::mt19937_64 eng = make_engine(p.seed, static_cast<std::uint64_t>(i));
        const double n = sample_detector_count(sino.data[i], p, eng);
        const double floored = std::max(n, 1.0); // 1-photon floor keeps the log finite
        out.data[i] = static_cast<float>(-std::log(floored / p.n0));
    }
    return out;
}

/// Output grid for FBP.
struct ReconGrid {
    int width = 0;
    int height = 0;
    double pixel_spacing = 1.0;
};

/// Equiangular fan-beam filtered backprojection:
/// cosine weighting, Ram-Lak ramp via zero-padded FFT (length >= 2x detectors),
/// then pixel-driven backprojection with inverse-square distance weighting and
/// linear interpolation across the detector bank.
inline Image2D fbp_reconstruct(const Sinogram& sino, const ReconGrid& grid) {
    sino.validate();
    const FanBeamGeometry& geom = sino.geometry;
    if (grid.width <= 0 || grid.height <= 0 || !(grid.pixel_spacing > 0.0))
        throw std::invalid_argument("fbp_reconstruct: invalid reconstruction grid");

    const int nd = geom.n_detectors;
    const int nv = geom.n_views;
    const double dg = geom.delta_gamma();
    const double d_src = geom.source_to_axis;

    // ramp kernel for equiangular rays: h(0) = 1/(8 dg^2),
    // h(n) = -1/(2 pi^2 sin^2(n dg)) for odd n, 0 for even n
    std::size_t len = 1;
    while (len < static_cast<std::size_t>(2 * nd)) len <<= 1;
    std::vector<double> kernel(len, 0.0);
    kernel[0] = 1.0 / (8.0 * dg * dg);
    for (int k = 1; k < nd; ++k) {
        double val = 0.0;
        if (k % 2 == 1) {
            const double s = std::sin(k * dg);
            val = -1.0 / (2.0 * std::numbers::pi * std::numbers::pi * s * s);
        }
        kernel[k] = val;
        kernel[len - k] = val;
    }

    Eigen::FFT<double> fft;
    std::vector<std::complex<double>> kernel_f(len);
    fft.fwd(kernel_f, kernel);

    // cosine-weight and filter each view
    std::vector<double> filtered(static_cast<std::size_t>(nv) * nd);
    {
        std::vector<double> row(len);
        std::vector<std::complex<double>> row_f(len);
        for (int v = 0; v < nv; ++v) {
            std::fill(row.begin(), row.end(), 0.0);
            for (int d = 0; d < nd; ++d)
                row[d] = sino.at(v, d) * d_src * std::cos(geom.gamma(d));
            fft.fwd(row_f, row);
            for (std::size_t i = 0; i < len; ++i) row_f[i] *= kernel_f[i];
            fft.inv(row, row_f);
            for (int d = 0; d < nd; ++d)
                filtered[static_cast<std::size_t>(v) * nd + d] = row[d] * dg;
        }
    }

    Image2D out(grid.width, grid.height, grid.pixel_spacing);
    const double d_beta = 2.0 * std::numbers::pi / nv;
    const double half_w = grid.width / 2.0, half_h = grid.height / 2.0;

    std::vector<double> cos_b(nv), sin_b(nv);
    for (int v = 0; v < nv; ++v) {
        cos_b[v] = std::cos(geom.view_angle(v));
        sin_b[v] = std::sin(geom.view_angle(v));
    }

#pragma omp parallel for schedule(static)
    for (int iy = 0; iy < grid.height; ++iy) {
        const double wy = (half_h - iy - 0.5) * grid.pixel_spacing;
        for (int ix = 0; ix < grid.width; ++ix) {
            const double wx = (ix + 0.5 - half_w) * grid.pixel_spacing;
            double acc = 0.0;
            for (int v = 0; v < nv; ++v) {
                const double sx = d_src * cos_b[v];
                const double sy = d_src * sin_b[v];
                const double rx = wx - sx, ry = wy - sy;
                const double l2 = rx * rx + ry * ry;
                // fan angle of the ray through this pixel: angle between the
                // central direction (-cos b, -sin b) and (rx, ry)
                const double dot = -rx * cos_b[v] - ry * sin_b[v];
                const double crs = -cos_b[v] * ry + sin_b[v] * rx;
                const double gp = std::atan2(crs, dot);
                const double fd = gp / dg + nd / 2.0 - 0.5;
                const int d0 = static_cast<int>(std::floor(fd));
                if (d0 < 0 || d0 + 1 >= nd) continue;
                const double f = fd - d0;
                const double* row = &filtered[static_cast<std::size_t>(v) * nd];
                acc += ((1.0 - f) * row[d0] + f * row[d0 + 1]) / l2;
            }
            out.at(ix, iy) = static_cast<float>(acc * d_beta);
        }
    }
    return out;
}

enum class SimUnits { Attenuation, Hounsfield };

struct SimulateOptions {
    SimUnits units = SimUnits::Hounsfield;
    bool no_noise = false; // skips injection entirely (n0 -> infinity limit)
};

/// Full low-dose acquisition chain: forward projection, quantum noise on the
/// detected counts, filtered backprojection onto the input grid.
inline Image2D simulate_ldct(const Image2D& img, const FanBeamGeometry& geom,
                             const NoiseModelParams& p, const SimulateOptions& opt = {}) {
    Image2D atten = img;
    if (opt.units == SimUnits::Hounsfield)
        for (float& v : atten.data) v = static_cast<float>(hu_to_mu(v));

    Sinogram sino = forward_project(atten, geom);
    if (!opt.no_noise) sino = inject_low_dose_noise(sino, p);

    Image2D recon =
        fbp_reconstruct(sino, ReconGrid{img.width, img.height, img.pixel_spacing});
    if (opt.units == SimUnits::Hounsfield)
        for (float& v : recon.data) v = static_cast<float>(mu_to_hu(v));
    return recon;
}

// "SINO" container: magic, version byte, u32 n_views, u32 n_detectors,
// f64 source_to_axis, f64 source_to_detector, f64 detector_arc,
// then f32 entries row-major (views x detectors), little-endian.
inline void write_sinogram(const std::string& path, const Sinogram& sino) {
    sino.validate();
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("write_sinogram: cannot open '" + path + "'");
    os.write("SINO", 4);
    os.put(static_cast<char>(1));
    detail::put_u32(os, static_cast<std::uint32_t>(sino.geometry.n_views));
    detail::put_u32(os, static_cast<std::uint32_t>(sino.geometry.n_detectors));
    detail::put_f64(os, sino.geometry.source_to_axis);
    detail::put_f64(os, sino.geometry.source_to_detector);
    detail::put_f64(os, sino.geometry.detector_arc);
    os.write(reinterpret_cast<const char*>(sino.data.data()),
             static_cast<std::streamsize>(sino.data.size() * sizeof(float)));
    if (!os) throw std::runtime_error("write_sinogram: write failed for '" + path + "'");
}

inline Sinogram read_sinogram(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("read_sinogram: cannot open '" + path + "'");
    char magic[4] = {};
    is.read(magic, 4);
    if (!is || std::memcmp(magic, "SINO", 4) != 0)
        throw std::runtime_error("read_sinogram: '" + path + "' is not a SINO file");
    const int version = is.get();
    if (version != 1)
        throw std::runtime_error("read_sinogram: unsupported version " + std::to_string(version));
    FanBeamGeometry g;
    g.n_views = static_cast<int>(detail::get_u32(is));
    g.n_detectors = static_cast<int>(detail::get_u32(is));
    g.source_to_axis = detail::get_f64(is);
    g.source_to_detector = detail::get_f64(is);
    g.detector_arc = detail::get_f64(is);
    if (!is) throw std::runtime_error("read_sinogram: truncated header in '" + path + "'");
    g.validate();
    Sinogram sino(g);
    is.read(reinterpret_cast<char*>(sino.data.data()),
            static_cast<std::streamsize>(sino.data.size() * sizeof(float)));
    if (static_cast<std::size_t>(is.gcount()) != sino.data.size() * sizeof(float))
        throw std::runtime_error("read_sinogram: payload size mismatch in '" + path + "'");
    sino.validate();
    return sino;
}

} // namespace ldct
