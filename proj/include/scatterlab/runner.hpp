#ifndef SCATTERLAB_RUNNER_HPP
#define SCATTERLAB_RUNNER_HPP

#include <string>

#include "scatterlab/config.hpp"
#include "scatterlab/lattice.hpp"

namespace scatterlab::cli {

// Exit codes: 0 success, 1 assertion failure (witness printed),
// 2 invalid configuration.
int run_subcommand(const std::string& cmd, const Config& cfg);

// Atomic write (temp file + rename).
void write_file(const std::string& path, const std::string& content);

// Norm-table cache: cache/norms_<X>_<p>_<q>.csv with checksum footer.
// Corrupt or missing caches fall back to a fresh sieve (and rewrite).
lattice::NormTable cached_norm_table(const Config& cfg, double X, const Rational& aspect_sq);

}  // namespace scatterlab::cli

#endif
