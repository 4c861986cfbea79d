#ifndef SCATTERLAB_CONFIG_HPP
#define SCATTERLAB_CONFIG_HPP

#include <map>
#include <string>

#include "scatterlab/geometry.hpp"
#include "scatterlab/scattering.hpp"
#include "scatterlab/sieve.hpp"

namespace scatterlab::cli {

// Flat `section.key = value` configuration with defaults for every field.
// The canonical serialization (sorted keys) feeds the config hash, so the
// hash is stable under key reordering.
class Config {
  public:
    Config();  // defaults

    static Config from_file(const std::string& path);
    void set(const std::string& key, const std::string& value);  // unknown key throws
    void apply_overrides(const std::map<std::string, std::string>& kv);

    const std::string& get(const std::string& key) const;
    double get_double(const std::string& key) const;
    std::int64_t get_int(const std::string& key) const;

    std::string canonical() const;
    std::uint64_t hash() const { return fnv1a(canonical()); }

    // Typed views (validated; std::invalid_argument on bad values).
    TorusGeometry geometry() const;
    sieve::FilterParams filter_params() const;
    scattering::ExtensionU extension() const;
    scattering::ScanOptions scan_options() const;
    double solver_cutoff() const;
    void validate() const;

  private:
    std::map<std::string, std::string> kv_;
};

}  // namespace scatterlab::cli

#endif
