#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "shyp/rng.hpp"
#include "shyp/spectrum.hpp"

namespace shyp {

struct TimeGrid {
    double T = 1.0;
    std::int64_t n_steps = 4096;

    double dt() const { return T / static_cast<double>(n_steps); }
    void validate() const;
    bool operator==(const TimeGrid&) const = default;
};

struct ModeTrajectory {
    std::int64_t k = 0;
    std::vector<double> u;   // n_steps + 1
    std::vector<double> v;   // n_steps + 1
    std::vector<double> dw;  // n_steps
};

using Mat2 = std::array<std::array<double, 2>, 2>;
using Mat3 = std::array<std::array<double, 3>, 3>;

// One exact step of (u, v) together with the Brownian increment.
struct Transition {
    Mat2 propagator{};  // [[g, f], [-lambda f, f']] at dt
    Mat3 joint_cov{};   // Cov(noise_u, noise_v, dw)
    Mat3 factor{};      // lower triangular, factor * factor^T = joint_cov (after clipping)
    double clip = 0.0;  // largest negative pivot set to zero, relative to its diagonal
    bool high_frequency = false;  // ell * dt > pi
};

Transition transition(double lambda, double mu, double dt);

// Draws the path into traj (resized to grid).  Three normals per step, in
// order, from `stream`.
void simulate_mode(const Transition& tr, const TimeGrid& grid, rng::NormalStream& stream, ModeTrajectory& traj);
ModeTrajectory simulate_mode(double lambda, double mu, const TimeGrid& grid, rng::NormalStream& stream);

// Modes 1..N; mode k uses the stream keyed by (seed, replicate, k).
std::vector<ModeTrajectory> simulate_solution(const SpectrumSpec& spec, const ModelParams& params, std::int64_t N,
                                              const TimeGrid& grid, std::uint64_t seed,
                                              std::uint64_t replicate = 0, unsigned workers = 1);

// sum_{i<n} integrand[i] * increments[i]; integrand has one more entry.
double ito_sum(std::span<const double> integrand, std::span<const double> increments);

// Increments x[i+1] - x[i].
std::vector<double> increments(std::span<const double> x);

// CSV with header comment "# T=<T> n_steps=<n>" and columns k,t_index,u,v,dw
// (dw empty on the last row of each mode).
void write_trajectories_csv(const std::string& path, const std::vector<ModeTrajectory>& trajs, const TimeGrid& grid);
std::vector<ModeTrajectory> read_trajectories_csv(const std::string& path, TimeGrid& grid);

}  // namespace shyp
