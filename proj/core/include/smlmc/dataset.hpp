#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "smlmc/filtering.hpp"
#include "smlmc/point.hpp"
#include "smlmc/random.hpp"
#include "smlmc/sim.hpp"

namespace smlmc {

inline constexpr int kFormatVersion = 1;

enum class Split { Train = 0, Val = 1, Test = 2 };
inline constexpr std::array<Split, 3> kAllSplits{Split::Train, Split::Val, Split::Test};

std::string split_name(Split s);
/// Throws InvalidArgument for anything but train/val/test.
Split parse_split(const std::string& name);

struct SplitSizes {
    std::int64_t train = 0;
    std::int64_t val = 0;
    std::int64_t test = 0;

    std::int64_t total() const noexcept { return train + val + test; }
    std::int64_t size(Split s) const noexcept;
    /// First sample id of the split; splits are contiguous in id order.
    std::int64_t first_id(Split s) const noexcept;
    Split split_of(std::int64_t sample_id) const noexcept;
    friend bool operator==(const SplitSizes&, const SplitSizes&) = default;
};

/// 80/10/10 by contiguous id ranges; val and test get floor(n/10).
SplitSizes compute_splits(std::int64_t n_samples);

struct FileDigest {
    std::string name;
    std::string sha256;
    friend bool operator==(const FileDigest&, const FileDigest&) = default;
};

struct DatasetManifest {
    int format_version = kFormatVersion;
    std::string condition;
    std::uint64_t master_seed = 0;
    std::int64_t n_samples = 0;
    SplitSizes splits;
    std::int64_t n_out = 0;
    std::int64_t max_seq_len = 0;
    double sigma_loc_nm = 0.0;
    double filter_radius_nm = 0.0;
    std::vector<FileDigest> files;

    friend bool operator==(const DatasetManifest&, const DatasetManifest&) = default;
};

std::string manifest_to_json(const DatasetManifest& m);
/// Throws ParseError / VersionMismatchError.
DatasetManifest manifest_from_json(const std::string& text, const std::string& origin);

/// One benchmark sample. Localization provenance refers to indices into
/// ground_truth, and every coordinate is already at on-disk precision.
struct Sample {
    std::int64_t sample_id = 0;
    std::vector<Point> ground_truth;
    std::vector<LocalizationRecord> localizations;
    std::int64_t seq_len = 0;

    friend bool operator==(const Sample&, const Sample&) = default;
};

RandomStream derive_sample_stream(std::uint64_t master_seed, std::int64_t sample_id,
                                  std::uint64_t retry_index = 0);

/// simulate -> detection filter -> retained emitters.
FilteredSample generate_sample(const ConditionParams& params, RandomStream& stream);

/// Packs a filtered sample into the on-disk representation.
Sample to_sample(std::int64_t sample_id, const FilteredSample& filtered);

struct GenerateOptions {
    std::int64_t n_samples = 0;
    std::uint64_t master_seed = 0;
    bool fixed_n = true;
    std::filesystem::path output_dir;
    unsigned threads = 0;  // 0: hardware concurrency
    std::int64_t pilot_size = 1000;  // pilot draws used to choose n_out
    std::int64_t max_retries = 10000;
    // Fixed-N target: smallest retained count reaching this share of the
    // pilot. 0 selects the plain pilot minimum.
    double min_pilot_fraction = 0.01;
};

DatasetManifest generate_dataset(const ConditionParams& params, const GenerateOptions& options);
DatasetManifest generate_dataset(const std::string& condition_id, const GenerateOptions& options);

/// A fully parsed dataset directory; each split holds its samples in id order.
struct LoadedDataset {
    DatasetManifest manifest;
    std::array<std::vector<Sample>, 3> splits;

    const std::vector<Sample>& split(Split s) const {
        return splits[static_cast<std::size_t>(s)];
    }
};

DatasetManifest read_manifest(const std::filesystem::path& dir);

/// Parses and verifies every file. Errors: VersionMismatchError,
/// ParseError (with line), DigestMismatchError (naming the file), IoError.
LoadedDataset load_dataset(const std::filesystem::path& dir);

/// Same, for the three files of one split.
std::vector<Sample> load_split(const std::filesystem::path& dir, Split split,
                               DatasetManifest* manifest_out = nullptr);

std::string localizations_file(Split s);
std::string ground_truth_file(Split s);
std::string provenance_file(Split s);

/// Line-oriented dump used as the cross-implementation parity reference.
void write_canonical_dump(const LoadedDataset& data, std::ostream& out);

}  // namespace smlmc
