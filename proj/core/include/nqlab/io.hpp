#pragma once

#include <map>
#include <string>
#include <vector>

#include "nqlab/control.hpp"
#include "nqlab/dynamics.hpp"
#include "nqlab/numtheory.hpp"
#include "nqlab/spectral.hpp"

namespace nqlab::io {

// Shortest decimal text that round-trips a double.
std::string format_double(double v);
// RFC 4180 field quoting.
std::string csv_field(const std::string& s);
std::string csv_row(const std::vector<std::string>& fields);

std::string spectrum_json(const Spectrum& s);
Spectrum spectrum_from_json(const std::string& text);

std::string potential_json(const Potential& p);
Potential potential_from_json(const std::string& text);
std::string potential_csv(const Potential& p);  // x,U

std::string basis_json(const EigenBasis& b);
EigenBasis basis_from_json(const std::string& text);
std::string basis_csv(const EigenBasis& b, int states);  // x,psi_0..psi_{states-1}

std::string synthesis_report_json(const SynthesisReport& r);

// t,E,norm,cascade_fraction,bound_population,P_<name>...
std::string trajectory_csv(const Trajectory& tr, const std::vector<std::string>& names);

std::string pulse_csv(const ControlPulse& p);  // t,b
ControlPulse pulse_from_csv(const std::string& text, DriveForm form, double beta);

// Plain-text "key = value" files; '#' starts a comment, blank lines ignored.
class KeyValueConfig {
public:
    static KeyValueConfig parse(const std::string& text);
    static KeyValueConfig load(const std::string& path);

    bool has(const std::string& key) const { return values_.count(key) != 0; }
    std::string get_string(const std::string& key, const std::string& fallback = "") const;
    double get_double(const std::string& key, double fallback) const;
    int get_int(const std::string& key, int fallback) const;
    std::vector<double> get_doubles(const std::string& key) const;  // comma or whitespace separated
    const std::map<std::string, std::string>& values() const { return values_; }
    // Throws ConfigError naming the first key outside `allowed`.
    void require_known(const std::vector<std::string>& allowed) const;

private:
    std::map<std::string, std::string> values_;
};

SynthesisOptions synthesis_options_from(const KeyValueConfig& cfg, SynthesisOptions base = {});

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

}  // namespace nqlab::io
