#include "smlmc/dataset.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

#include "parallel.hpp"
#include "smlmc/errors.hpp"
#include "smlmc/format.hpp"
#include "smlmc/registry.hpp"

namespace smlmc {

namespace fs = std::filesystem;

std::string split_name(Split s) {
    switch (s) {
        case Split::Train: return "train";
        case Split::Val: return "val";
        case Split::Test: return "test";
    }
    return "?";
}

Split parse_split(const std::string& name) {
    if (name == "train") return Split::Train;
    if (name == "val") return Split::Val;
    if (name == "test") return Split::Test;
    throw InvalidArgument("unknown split '" + name + "' (expected train, val or test)");
}

std::int64_t SplitSizes::size(Split s) const noexcept {
    switch (s) {
        case Split::Train: return train;
        case Split::Val: return val;
        case Split::Test: return test;
    }
    return 0;
}

std::int64_t SplitSizes::first_id(Split s) const noexcept {
    switch (s) {
        case Split::Train: return 0;
        case Split::Val: return train;
        case Split::Test: return train + val;
    }
    return 0;
}

Split SplitSizes::split_of(std::int64_t sample_id) const noexcept {
    if (sample_id < train) return Split::Train;
    if (sample_id < train + val) return Split::Val;
    return Split::Test;
}

SplitSizes compute_splits(std::int64_t n_samples) {
    SplitSizes s;
    s.val = n_samples / 10;
    s.test = n_samples / 10;
    s.train = n_samples - s.val - s.test;
    return s;
}

std::string localizations_file(Split s) { return split_name(s) + ".localizations.csv"; }
std::string ground_truth_file(Split s) { return split_name(s) + ".ground_truth.csv"; }
std::string provenance_file(Split s) { return split_name(s) + ".provenance.csv"; }

namespace {

constexpr std::string_view kLocHeader = "sample_id,frame,x_nm,y_nm";
constexpr std::string_view kGtHeader = "sample_id,emitter_idx,x_nm,y_nm";
constexpr std::string_view kProvHeader = "sample_id,frame,true_emitter_idx";

std::size_t line_of_byte(const std::string& text, std::size_t byte) {
    byte = std::min(byte, text.size());
    return 1 + static_cast<std::size_t>(
                   std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(byte), '\n'));
}

}  // namespace

std::string manifest_to_json(const DatasetManifest& m) {
    nlohmann::ordered_json j;
    j["format_version"] = m.format_version;
    j["condition"] = m.condition;
    j["master_seed"] = m.master_seed;
    j["n_samples"] = m.n_samples;
    j["splits"] = {{"train", m.splits.train}, {"val", m.splits.val}, {"test", m.splits.test}};
    j["n_out"] = m.n_out;
    j["max_seq_len"] = m.max_seq_len;
    j["sigma_loc_nm"] = m.sigma_loc_nm;
    j["filter_radius_nm"] = m.filter_radius_nm;
    auto files = nlohmann::ordered_json::array();
    for (const auto& f : m.files) files.push_back({{"name", f.name}, {"sha256", f.sha256}});
    j["files"] = std::move(files);
    return j.dump(2) + "\n";
}

DatasetManifest manifest_from_json(const std::string& text, const std::string& origin) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(origin, line_of_byte(text, e.byte), "malformed JSON");
    }
    if (!j.is_object()) throw ParseError(origin, 1, "manifest is not a JSON object");

    if (!j.contains("format_version") || !j["format_version"].is_number_integer()) {
        throw ParseError(origin, 1, "missing integer key 'format_version'");
    }
    const int version = j["format_version"].get<int>();
    if (version != kFormatVersion) {
        throw VersionMismatchError(origin + ": format_version " + std::to_string(version) +
                                   " is not supported (expected " +
                                   std::to_string(kFormatVersion) + ")");
    }

    static const std::vector<std::string> kKeys = {
        "format_version", "condition", "master_seed", "n_samples",      "splits",
        "n_out",          "max_seq_len", "sigma_loc_nm", "filter_radius_nm", "files"};
    for (const auto& [key, _] : j.items()) {
        if (std::find(kKeys.begin(), kKeys.end(), key) == kKeys.end()) {
            throw ParseError(origin, 1, "unexpected key '" + key + "'");
        }
    }

    DatasetManifest m;
    try {
        m.format_version = version;
        m.condition = j.at("condition").get<std::string>();
        m.master_seed = j.at("master_seed").get<std::uint64_t>();
        m.n_samples = j.at("n_samples").get<std::int64_t>();
        const auto& splits = j.at("splits");
        m.splits.train = splits.at("train").get<std::int64_t>();
        m.splits.val = splits.at("val").get<std::int64_t>();
        m.splits.test = splits.at("test").get<std::int64_t>();
        m.n_out = j.at("n_out").get<std::int64_t>();
        m.max_seq_len = j.at("max_seq_len").get<std::int64_t>();
        m.sigma_loc_nm = j.at("sigma_loc_nm").get<double>();
        m.filter_radius_nm = j.at("filter_radius_nm").get<double>();
        for (const auto& f : j.at("files")) {
            m.files.push_back({f.at("name").get<std::string>(), f.at("sha256").get<std::string>()});
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(origin, 1, std::string("bad manifest field: ") + e.what());
    }
    if (m.splits.total() != m.n_samples) {
        throw ParseError(origin, 1, "split sizes do not sum to n_samples");
    }
    if (m.n_out < 1) throw ParseError(origin, 1, "n_out must be at least 1");
    return m;
}

RandomStream derive_sample_stream(std::uint64_t master_seed, std::int64_t sample_id,
                                  std::uint64_t retry_index) {
    return RandomStream(master_seed, static_cast<std::uint64_t>(sample_id), retry_index);
}

FilteredSample generate_sample(const ConditionParams& params, RandomStream& stream) {
    Acquisition acq = simulate_acquisition(params, stream);
    FilterResult filtered = apply_detection_filter(acq.records, params.filter_radius_nm);
    return retain_emitters(acq.emitters, std::move(filtered.kept), filtered.dropped_count);
}

Sample to_sample(std::int64_t sample_id, const FilteredSample& filtered) {
    Sample s;
    s.sample_id = sample_id;
    std::unordered_map<std::int64_t, std::int64_t> index_of;
    for (const auto& e : filtered.retained_emitters) {
        index_of.emplace(e.emitter_id, static_cast<std::int64_t>(s.ground_truth.size()));
        s.ground_truth.push_back({quantize_coord(e.x_nm), quantize_coord(e.y_nm)});
    }
    s.localizations.reserve(filtered.localizations.size());
    for (const auto& rec : filtered.localizations) {
        s.localizations.push_back({rec.frame, quantize_coord(rec.x_nm), quantize_coord(rec.y_nm),
                                   index_of.at(rec.true_emitter_id)});
        s.seq_len = std::max(s.seq_len, rec.frame);
    }
    return s;
}

namespace {

class SplitWriter {
public:
    SplitWriter(const fs::path& dir, Split split)
        : loc_(open(dir / localizations_file(split))),
          gt_(open(dir / ground_truth_file(split))),
          prov_(open(dir / provenance_file(split))) {
        loc_ << kLocHeader << '\n';
        gt_ << kGtHeader << '\n';
        prov_ << kProvHeader << '\n';
    }

    void write(const Sample& s) {
        std::string loc, gt, prov;
        for (std::size_t i = 0; i < s.ground_truth.size(); ++i) {
            append_int(gt, s.sample_id);
            gt += ',';
            append_int(gt, static_cast<std::int64_t>(i));
            gt += ',';
            append_coord(gt, s.ground_truth[i].x_nm);
            gt += ',';
            append_coord(gt, s.ground_truth[i].y_nm);
            gt += '\n';
        }
        for (const auto& rec : s.localizations) {
            append_int(loc, s.sample_id);
            loc += ',';
            append_int(loc, rec.frame);
            loc += ',';
            append_coord(loc, rec.x_nm);
            loc += ',';
            append_coord(loc, rec.y_nm);
            loc += '\n';

            append_int(prov, s.sample_id);
            prov += ',';
            append_int(prov, rec.frame);
            prov += ',';
            append_int(prov, rec.true_emitter_id);
            prov += '\n';
        }
        loc_ << loc;
        gt_ << gt;
        prov_ << prov;
    }

    void close(const fs::path& dir, Split split) {
        for (auto* f : {&loc_, &gt_, &prov_}) {
            f->close();
            if (!*f) {
                throw IoError("failed writing split '" + split_name(split) + "' in " +
                              dir.string());
            }
        }
    }

private:
    static std::ofstream open(const fs::path& path) {
        std::ofstream f(path, std::ios::binary | std::ios::trunc);
        if (!f) throw IoError("cannot write " + path.string());
        return f;
    }

    std::ofstream loc_, gt_, prov_;
};

std::string retained_histogram(const std::map<std::size_t, std::int64_t>& hist) {
    std::ostringstream os;
    bool first = true;
    for (const auto& [count, n] : hist) {
        os << (first ? "" : ", ") << count << ":" << n;
        first = false;
    }
    return os.str();
}

}  // namespace

DatasetManifest generate_dataset(const ConditionParams& params, const GenerateOptions& options) {
    params.validate();
    check_not_excluded(params);
    if (options.n_samples < 10) {
        throw InvalidArgument("n_samples must be at least 10 (got " +
                              std::to_string(options.n_samples) + ")");
    }
    if (options.max_retries < 1 || options.pilot_size < 1) {
        throw InvalidArgument("pilot size and retry limit must be positive");
    }
    if (!(options.min_pilot_fraction >= 0.0 && options.min_pilot_fraction <= 1.0)) {
        throw InvalidArgument("min_pilot_fraction must lie in [0, 1]");
    }

    const std::uint64_t seed = options.master_seed;
    const unsigned threads = detail::resolve_threads(options.threads);

    // Fixed-N: the output size is the smallest non-zero retained count that
    // occurs in at least min_pilot_fraction of the pilot draws. A single
    // outlier minimum would make the per-slot rejection loop hopeless. The
    // pilot uses the retry-0 streams of ids [0, pilot_size) whatever n_samples
    // is, so n_out does not depend on the dataset size.
    std::int64_t n_out = 0;
    if (options.fixed_n) {
        const std::int64_t pilot = options.pilot_size;
        std::vector<std::size_t> counts(static_cast<std::size_t>(pilot));
        detail::parallel_for(pilot, threads, [&](std::int64_t i) {
            RandomStream rng = derive_sample_stream(seed, i, 0);
            counts[static_cast<std::size_t>(i)] = generate_sample(params, rng).retained_emitters.size();
        });
        std::map<std::size_t, std::int64_t> histogram;
        for (auto c : counts) {
            if (c > 0) ++histogram[c];
        }
        const double needed = options.min_pilot_fraction * static_cast<double>(pilot);
        for (const auto& [retained, draws] : histogram) {
            if (static_cast<double>(draws) >= needed) {
                n_out = static_cast<std::int64_t>(retained);
                break;
            }
        }
        if (n_out == 0) {
            throw RejectionLimitError("no pilot sample of condition '" + params.id +
                                      "' retained any emitter");
        }
    }

    std::error_code ec;
    fs::create_directories(options.output_dir, ec);
    if (ec || !fs::is_directory(options.output_dir)) {
        throw IoError("cannot create output directory " + options.output_dir.string());
    }

    auto accept = [&](std::size_t retained) {
        return options.fixed_n ? static_cast<std::int64_t>(retained) == n_out : retained >= 1;
    };

    const SplitSizes splits = compute_splits(options.n_samples);
    std::array<std::unique_ptr<SplitWriter>, 3> writers;
    for (Split s : kAllSplits) {
        writers[static_cast<std::size_t>(s)] = std::make_unique<SplitWriter>(options.output_dir, s);
    }

    std::int64_t max_seq_len = 0;
    std::int64_t min_retained = std::numeric_limits<std::int64_t>::max();
    constexpr std::int64_t kChunk = 2048;
    std::vector<Sample> chunk;
    for (std::int64_t base = 0; base < options.n_samples; base += kChunk) {
        const std::int64_t count = std::min(kChunk, options.n_samples - base);
        chunk.assign(static_cast<std::size_t>(count), Sample{});
        detail::parallel_for(count, threads, [&](std::int64_t offset) {
            const std::int64_t id = base + offset;
            std::map<std::size_t, std::int64_t> seen;
            for (std::int64_t retry = 0; retry < options.max_retries; ++retry) {
                RandomStream rng = derive_sample_stream(seed, id, static_cast<std::uint64_t>(retry));
                FilteredSample fsample = generate_sample(params, rng);
                if (accept(fsample.retained_emitters.size())) {
                    chunk[static_cast<std::size_t>(offset)] = to_sample(id, fsample);
                    return;
                }
                ++seen[fsample.retained_emitters.size()];
            }
            std::ostringstream os;
            os << "sample slot " << id << " of condition '" << params.id << "': no draw with "
               << (options.fixed_n ? std::to_string(n_out) : std::string(">= 1"))
               << " retained emitters after " << options.max_retries
               << " retries; retained counts seen (count:draws): " << retained_histogram(seen);
            throw RejectionLimitError(os.str());
        });
        for (const Sample& s : chunk) {
            writers[static_cast<std::size_t>(splits.split_of(s.sample_id))]->write(s);
            max_seq_len = std::max(max_seq_len, s.seq_len);
            min_retained = std::min(min_retained, static_cast<std::int64_t>(s.ground_truth.size()));
        }
    }
    for (Split s : kAllSplits) writers[static_cast<std::size_t>(s)]->close(options.output_dir, s);

    DatasetManifest m;
    m.condition = params.id;
    m.master_seed = seed;
    m.n_samples = options.n_samples;
    m.splits = splits;
    m.n_out = options.fixed_n ? n_out : min_retained;
    m.max_seq_len = max_seq_len;
    m.sigma_loc_nm = params.sigma_loc_nm;
    m.filter_radius_nm = params.filter_radius_nm;
    for (Split s : kAllSplits) {
        for (const auto& name : {localizations_file(s), ground_truth_file(s), provenance_file(s)}) {
            m.files.push_back({name, sha256_file(options.output_dir / name)});
        }
    }

    const fs::path manifest_path = options.output_dir / "manifest.json";
    std::ofstream out(manifest_path, std::ios::binary | std::ios::trunc);
    out << manifest_to_json(m);
    out.close();
    if (!out) throw IoError("cannot write " + manifest_path.string());
    return m;
}

DatasetManifest generate_dataset(const std::string& condition_id, const GenerateOptions& options) {
    return generate_dataset(find_condition(condition_id), options);
}

DatasetManifest read_manifest(const fs::path& dir) {
    const fs::path path = dir / "manifest.json";
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::ostringstream text;
    text << in.rdbuf();
    return manifest_from_json(text.str(), path.string());
}

namespace {

const std::string& expected_digest(const DatasetManifest& m, const std::string& name) {
    for (const auto& f : m.files) {
        if (f.name == name) return f.sha256;
    }
    throw DataError("manifest lists no digest for " + name);
}

void expect_header(HashingLineReader& reader, std::string_view header, const std::string& file) {
    std::string_view line;
    if (!reader.next(line)) throw ParseError(file, 1, "empty file, expected header");
    if (line != header) {
        throw ParseError(file, reader.line_number(),
                         "expected header '" + std::string(header) + "'");
    }
}

struct Row {
    std::int64_t sample_id = 0;
    std::int64_t a = 0;
    double x = 0.0;
    double y = 0.0;
};

Row parse_row(std::string_view line, std::size_t n_fields, const std::string& file,
              std::size_t line_no) {
    const auto fields = split_fields(line);
    if (fields.size() != n_fields) {
        throw ParseError(file, line_no,
                         "expected " + std::to_string(n_fields) + " fields, found " +
                             std::to_string(fields.size()));
    }
    Row row;
    if (!parse_int(fields[0], row.sample_id)) throw ParseError(file, line_no, "bad sample_id");
    if (!parse_int(fields[1], row.a)) throw ParseError(file, line_no, "bad integer field");
    if (n_fields == 4) {
        if (!parse_double(fields[2], row.x) || !parse_double(fields[3], row.y)) {
            throw ParseError(file, line_no, "bad coordinate");
        }
    }
    return row;
}

std::vector<Sample> parse_split_files(const fs::path& dir, Split split, const DatasetManifest& m) {
    const std::int64_t first = m.splits.first_id(split);
    const std::int64_t size = m.splits.size(split);
    std::vector<Sample> samples(static_cast<std::size_t>(size));
    for (std::int64_t i = 0; i < size; ++i) samples[static_cast<std::size_t>(i)].sample_id = first + i;

    auto slot = [&](std::int64_t sample_id, const std::string& file, std::size_t line_no) -> Sample& {
        if (sample_id < first || sample_id >= first + size) {
            throw ParseError(file, line_no,
                             "sample_id " + std::to_string(sample_id) + " outside split '" +
                                 split_name(split) + "'");
        }
        return samples[static_cast<std::size_t>(sample_id - first)];
    };

    std::vector<std::pair<std::string, std::string>> digests;

    {
        const std::string name = ground_truth_file(split);
        HashingLineReader reader(dir / name);
        expect_header(reader, kGtHeader, name);
        std::string_view line;
        std::int64_t prev_id = -1;
        while (reader.next(line)) {
            const Row row = parse_row(line, 4, name, reader.line_number());
            if (row.sample_id < prev_id) {
                throw ParseError(name, reader.line_number(), "rows not sorted by sample_id");
            }
            prev_id = row.sample_id;
            Sample& s = slot(row.sample_id, name, reader.line_number());
            if (row.a != static_cast<std::int64_t>(s.ground_truth.size())) {
                throw ParseError(name, reader.line_number(), "emitter_idx out of sequence");
            }
            s.ground_truth.push_back({row.x, row.y});
        }
        for (const auto& s : samples) {
            if (s.ground_truth.empty()) {
                throw ParseError(name, reader.line_number(),
                                 "sample " + std::to_string(s.sample_id) + " has no ground truth");
            }
        }
        digests.emplace_back(name, reader.finish());
    }

    {
        const std::string name = localizations_file(split);
        HashingLineReader reader(dir / name);
        expect_header(reader, kLocHeader, name);
        std::string_view line;
        std::int64_t prev_id = -1;
        std::int64_t prev_frame = 0;
        while (reader.next(line)) {
            const Row row = parse_row(line, 4, name, reader.line_number());
            if (row.sample_id < prev_id || (row.sample_id == prev_id && row.a < prev_frame)) {
                throw ParseError(name, reader.line_number(), "rows not sorted by (sample_id, frame)");
            }
            if (row.a < 1 || row.a > m.max_seq_len) {
                throw ParseError(name, reader.line_number(),
                                 "frame " + std::to_string(row.a) + " outside [1, max_seq_len]");
            }
            prev_id = row.sample_id;
            prev_frame = row.a;
            Sample& s = slot(row.sample_id, name, reader.line_number());
            s.localizations.push_back({row.a, row.x, row.y, -1});
            s.seq_len = std::max(s.seq_len, row.a);
        }
        digests.emplace_back(name, reader.finish());
    }

    {
        const std::string name = provenance_file(split);
        HashingLineReader reader(dir / name);
        expect_header(reader, kProvHeader, name);
        std::string_view line;
        std::size_t sample_pos = 0;
        std::size_t rec_pos = 0;
        auto advance = [&] {
            while (sample_pos < samples.size() &&
                   rec_pos >= samples[sample_pos].localizations.size()) {
                ++sample_pos;
                rec_pos = 0;
            }
        };
        advance();
        while (reader.next(line)) {
            const auto fields = split_fields(line);
            if (fields.size() != 3) {
                throw ParseError(name, reader.line_number(),
                                 "expected 3 fields, found " + std::to_string(fields.size()));
            }
            std::int64_t sample_id = 0, frame = 0, idx = 0;
            if (!parse_int(fields[0], sample_id) || !parse_int(fields[1], frame) ||
                !parse_int(fields[2], idx)) {
                throw ParseError(name, reader.line_number(), "bad integer field");
            }
            if (sample_pos >= samples.size()) {
                throw ParseError(name, reader.line_number(), "more rows than localizations");
            }
            Sample& s = samples[sample_pos];
            auto& rec = s.localizations[rec_pos];
            if (sample_id != s.sample_id || frame != rec.frame) {
                throw ParseError(name, reader.line_number(),
                                 "row does not match localization (sample " +
                                     std::to_string(s.sample_id) + ", frame " +
                                     std::to_string(rec.frame) + ")");
            }
            if (idx < 0 || idx >= static_cast<std::int64_t>(s.ground_truth.size())) {
                throw ParseError(name, reader.line_number(), "true_emitter_idx out of range");
            }
            rec.true_emitter_id = idx;
            ++rec_pos;
            advance();
        }
        if (sample_pos < samples.size()) {
            throw ParseError(name, reader.line_number() + 1,
                             "fewer rows than localizations (missing from sample " +
                                 std::to_string(samples[sample_pos].sample_id) + ")");
        }
        digests.emplace_back(name, reader.finish());
    }

    for (const auto& [name, actual] : digests) {
        const std::string& expected = expected_digest(m, name);
        if (expected != actual) throw DigestMismatchError(name, expected, actual);
    }
    return samples;
}

}  // namespace

std::vector<Sample> load_split(const fs::path& dir, Split split, DatasetManifest* manifest_out) {
    DatasetManifest m = read_manifest(dir);
    auto samples = parse_split_files(dir, split, m);
    if (manifest_out) *manifest_out = std::move(m);
    return samples;
}

LoadedDataset load_dataset(const fs::path& dir) {
    LoadedDataset data;
    data.manifest = read_manifest(dir);
    for (Split s : kAllSplits) {
        data.splits[static_cast<std::size_t>(s)] = parse_split_files(dir, s, data.manifest);
    }
    return data;
}

void write_canonical_dump(const LoadedDataset& data, std::ostream& out) {
    const auto& m = data.manifest;
    out << "manifest format_version=" << m.format_version << " condition=" << m.condition
        << " master_seed=" << m.master_seed << " n_samples=" << m.n_samples
        << " n_out=" << m.n_out << " max_seq_len=" << m.max_seq_len << "\n";
    for (Split split : kAllSplits) {
        for (const Sample& s : data.split(split)) {
            out << "sample " << split_name(split) << ' ' << s.sample_id
                << " gt=" << s.ground_truth.size() << " locs=" << s.localizations.size()
                << " seq_len=" << s.seq_len << "\n";
            for (std::size_t i = 0; i < s.ground_truth.size(); ++i) {
                out << "gt " << i << ' ' << format_coord(s.ground_truth[i].x_nm) << ' '
                    << format_coord(s.ground_truth[i].y_nm) << "\n";
            }
            for (const auto& rec : s.localizations) {
                out << "loc " << rec.frame << ' ' << format_coord(rec.x_nm) << ' '
                    << format_coord(rec.y_nm) << ' ' << rec.true_emitter_id << "\n";
            }
        }
    }
}

}  // namespace smlmc
