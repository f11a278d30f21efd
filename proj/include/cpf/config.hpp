#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "cpf/experiments.hpp"

namespace cpf {

// How the magnetic field is specified; exactly one form per config.
enum class FieldSpec { DeltaOverKappa, DeltaOverG, FieldMilliTesla };

// Rates are held in units of kappa so text round-trips are exact.
struct PhysicalSection {
    double kappa_mhz = 2.0;  // kappa / 2pi in MHz
    double g_over_kappa = 3.0;
    double gamma_over_kappa = 0.0;
    double omega0_over_kappa = 5.0;
    FieldSpec field = FieldSpec::DeltaOverKappa;
    double field_value = 10.0;
    std::array<double, 4> split_over_kappa{};  // order (-2, -1, +1, +2)
    bool use_cg_scaling = true;
    bool resonant_only = false;

    friend bool operator==(const PhysicalSection&, const PhysicalSection&) = default;
};

struct PulseSection {
    PulseShape shape = PulseShape::Gaussian;
    double sigma_over_kappa = 1.0;
    double window_factor = 1.0;

    friend bool operator==(const PulseSection&, const PulseSection&) = default;
};

struct GridSection {
    int n_bins = 200;
    double band_over_kappa = 128.0;

    friend bool operator==(const GridSection&, const GridSection&) = default;
};

struct EvolutionSection {
    double dt_kappa = 1e-3;
    Method method = Method::TrotterSplit;
    bool strict = false;
    bool self_converge = false;
    double scatter_window_kappa = 10.0;
    ChannelSource source = ChannelSource::TimeDomain;

    friend bool operator==(const EvolutionSection&, const EvolutionSection&) = default;
};

struct ExperimentSection {
    SweepAxis axis = SweepAxis::DetuningRatio;
    std::vector<double> points;  // empty: subcommand default
    int repeats = 50;
    std::uint64_t seed = 0;
    std::vector<PulseShape> shapes = {PulseShape::Gaussian, PulseShape::Sech, PulseShape::Lorentzian};
    double zeta = 0.05;

    friend bool operator==(const ExperimentSection&, const ExperimentSection&) = default;
};

struct OutputSection {
    std::string directory = ".";
    std::vector<std::string> formats = {"csv", "json"};

    friend bool operator==(const OutputSection&, const OutputSection&) = default;
};

struct RunConfig {
    PhysicalSection physical;
    PulseSection pulse;
    GridSection grid;
    EvolutionSection evolution;
    ExperimentSection experiment;
    OutputSection output;

    void validate() const;
    double kappa() const;  // rad/s
    PhysicalConfig physical_config() const;
    SimulationSetup setup(int threads = 1) const;
    bool wants(const std::string& format) const;

    friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

// Sections: physical, pulse, grid, evolution, experiment, output. Frequencies take a
// unit suffix ("3 kappa", "6 MHz", "20 kHz"; MHz and kHz are ordinary frequencies).
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);
std::string serialize(const RunConfig& cfg);

// FNV-1a of the canonical serialization, as 16 hex digits.
std::string config_hash(const RunConfig& cfg);

// Shortest text that parses back to the same double.
std::string format_double(double v);

}  // namespace cpf
