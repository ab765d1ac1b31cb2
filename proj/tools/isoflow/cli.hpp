#ifndef ISOFLOW_CLI_HPP
#define ISOFLOW_CLI_HPP

#include "isoperiodic/curve.hpp"

#include <json.hpp>

#include <iosfwd>
#include <optional>
#include <string>

namespace isoflow
{

using isoperiodic::Complex;

inline constexpr const char *version = "0.1.0";

enum ExitCode { exit_ok = 0, exit_error = 1, exit_verification_failed = 2 };

struct RunConfig {
    std::string command = "periods"; // periods | verify | flow | boussinesq | rauch-check

    Complex x{0.5, 0.0};
    std::optional<Complex> x_end;
    std::optional<double> region_radius;

    Complex y0{2.0, 0.0};
    int sheet = 1;

    int n = 0;
    Complex A{0.0, 0.0};
    std::string mode = "first_order";
    int samples = 21;

    double quad_rel = 1e-10;
    double quad_abs = 1e-12;
    double ivp_rel = 1e-10;
    double ivp_abs = 1e-12;
    double verify_tol = 1e-8; // B drift, Boussinesq residual and c spread
    double gap_tol = 1e-7;    // first/second-order trajectory gap

    int grid_nx = 64;
    int grid_ny = 64;
    Complex z0{0.0, 0.0};

    double h = 1e-4;
    unsigned seed = 1;

    std::string format = "csv";
    std::string out; // empty: standard output

    bool operator==(const RunConfig &) const = default;

    // Throws ConfigError naming the offending field.
    void validate() const;
};

// Strict parse: unknown keys and wrong types raise ConfigError with the JSON
// path of the field. Missing keys keep their defaults.
RunConfig config_from_json(const nlohmann::json &j);
nlohmann::json config_to_json(const RunConfig &c);

// The working region used for a config: the segment x -> x_end (or the point
// x) thickened by region_radius, defaulting to a quarter of the distance
// to {0, 1}.
isoperiodic::Region region_for(const RunConfig &c);

// Runs the command, writing the artifact to `out`. Returns the exit code;
// library errors propagate as exceptions.
int run(const RunConfig &config, std::ostream &out);

// Entry point shared by the executable and the tests.
int main_with_args(int argc, char **argv, std::ostream &out, std::ostream &err);

} // namespace isoflow

#endif
