#pragma once

#include "covaug/npy.hpp"
#include "covaug/solvers.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace covaug {

enum class EquationKind { elliptic, convdiff, wave };
enum class Complexity { simple, complex };

std::string equation_name(EquationKind kind);
EquationKind equation_from_name(const std::string& name);
std::string complexity_name(Complexity complexity);
Complexity complexity_from_name(const std::string& name);

/// Everything needed to regenerate a dataset bit-for-bit: the recipe family,
/// grid sizes, random-field mode counts and scaling, and the master seed.
struct DatasetSpec {
  std::string name = "elliptic_1d";
  int dim = 1;
  EquationKind equation = EquationKind::elliptic;
  Complexity complexity = Complexity::simple;
  int n = 100;       ///< nodes per spatial axis
  int nt = 1;        ///< time levels (1 for stationary problems)
  double t_final = 0.0;
  int modes = 5;         ///< coefficient-field mode count
  int source_modes = 3;  ///< right-hand side / initial-condition mode count
  double scale = 1.0;    ///< multiplier applied to sampled coefficient fields
  bool diagonal_diffusion = false;  ///< restrict 2D diffusion to diag(a11, a11)
  bool store_trajectory = true;     ///< false: keep only the final time slice
  int n_samples = 100;
  std::uint64_t master_seed = 0;
};

/// Names accepted by default_spec, in canonical order.
std::vector<std::string> known_recipes();

/// The reference parameterization for a named recipe; `complexity` switches
/// the 2D variants (field scale and final time).  Throws std::invalid_argument
/// for unknown names.
DatasetSpec default_spec(const std::string& name,
                         Complexity complexity = Complexity::simple);

/// One named array of the dataset: row i is sample i, flattened C-order.
struct Channel {
  std::string name;
  std::vector<std::size_t> sample_shape;  ///< per-sample shape
  RowMatrixXd rows;                       ///< n_samples x prod(sample_shape)

  std::size_t flat_size() const;
};

/// Provenance of one sample row.
struct SampleRecord {
  std::uint64_t seed = 0;
  std::string status = "solved";  ///< "solved" | "failed" | "augmented"
  int retries = 0;                ///< seeds discarded before this one
  std::string error;              ///< diagnostic when status == "failed"
  nlohmann::json augmentation;    ///< {source, replica, map_seed, map} when augmented
};

struct Dataset {
  DatasetSpec spec;
  std::vector<Channel> channels;
  std::vector<SampleRecord> samples;
  nlohmann::json augmentation;  ///< factor/seed/map parameters; null for originals

  const Channel& channel(const std::string& name) const;  // throws invalid_argument
  Channel& channel(const std::string& name);
  bool has_channel(const std::string& name) const;
};

/// One sample's channels (per-sample shapes) plus its provenance record.
struct Sample {
  std::vector<std::pair<std::string, NpyArray>> channels;
  nlohmann::json provenance;
};

Sample get_sample(const Dataset& dataset, int index);

/// Draws coefficient fields per the recipe, runs the matching solver, and
/// assembles the channel arrays.  Sample i uses a seed derived from
/// (master_seed, i); a failed solve (e.g. a stability bound) is retried with
/// the next derived seed and the retry count recorded.  Deterministic given
/// `spec`, bit-identical for any worker count.
Dataset generate_dataset(const DatasetSpec& spec, int jobs = 1);

struct AugmentOptions {
  int factor = 1;          ///< random-map replicas per original
  std::uint64_t seed = 0;  ///< master seed for map sampling
  int map_modes = -1;      ///< <0: dimension default (5 in 1D, 6 in 2D)
  double map_beta = -1.0;  ///< <0: dimension default (1.0 in 1D, 1e-5 in 2D)
  int jobs = 1;
};

/// Appends `factor` coordinate-change replicas of every sample: originals
/// first and preserved verbatim, then replicas grouped by source sample.
/// The map for (sample i, replica r) is drawn from a seed derived from
/// (options.seed, i, r) and recorded in the sample's provenance.
Dataset augment_dataset(const Dataset& dataset, const AugmentOptions& options);

struct SampleVerdict {
  int index = 0;
  std::string status;  ///< "pass" | "fail" | "skipped"
  double rel_l2 = 0.0;
  double tolerance = 0.0;  ///< bound this sample was held to
  std::string note;        ///< skip reason or failure detail
};

struct VerificationReport {
  double tolerance = 0.0;
  std::vector<SampleVerdict> verdicts;

  int passed() const;
  int failed() const;
  int skipped() const;
  bool ok() const { return failed() == 0; }
};

/// Residual tolerance expected to hold for freshly generated data of this
/// recipe; `augmented` widens it to the coordinate-change truncation band.
double default_verify_tolerance(const DatasetSpec& spec, bool augmented);

/// Plugs every sample's channels back into the discrete equation and compares
/// the relative residual against `tolerance` (<= 0 picks the recipe default).
/// Samples whose stored target lacks the time levels a residual needs are
/// skipped with a note, as are samples that failed generation.
VerificationReport verify_dataset(const Dataset& dataset, double tolerance = 0.0);

/// Directory layout: one NPY v1.0 '<f8' C-order file per channel with shape
/// [n_samples, ...sample_shape], plus manifest.json holding the "spec" block,
/// the channel schema, and per-sample provenance.  read_dataset is the exact
/// inverse; a reread dataset rewrites byte-identically.
void write_dataset(const Dataset& dataset, const std::filesystem::path& dir);
Dataset read_dataset(const std::filesystem::path& dir);

/// The manifest document written by write_dataset.
nlohmann::json manifest_json(const Dataset& dataset);

}  // namespace covaug
