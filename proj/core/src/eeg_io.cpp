#include "eegssm/eeg_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "eegssm/errors.hpp"
#include "eegssm/rng.hpp"
#include "eegssm/spectral.hpp"

namespace eegssm {

namespace fs = std::filesystem;
using nlohmann::json;

const char* to_string(ClassLabel label) {
  switch (label) {
    case ClassLabel::HC: return "HC";
    case ClassLabel::FTD: return "FTD";
    case ClassLabel::AD: return "AD";
  }
  return "?";
}

ClassLabel label_from_string(const std::string& name) {
  if (name == "HC") return ClassLabel::HC;
  if (name == "FTD") return ClassLabel::FTD;
  if (name == "AD") return ClassLabel::AD;
  throw DataError("label_from_string: unknown label '" + name + "'");
}

const std::vector<std::string>& standard_montage() {
  static const std::vector<std::string> names = {"Fp1", "Fp2", "F7", "F3", "Fz", "F4", "F8",
                                                 "T3",  "C3",  "Cz", "C4", "T4", "T5", "P3",
                                                 "Pz",  "P4",  "T6", "O1", "O2"};
  return names;
}

namespace {

constexpr char kMagic[4] = {'E', 'E', 'G', 'S'};
constexpr std::uint32_t kBinaryVersion = 1;

void put_u32(std::ostream& os, std::uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                        static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
  os.write(reinterpret_cast<const char*>(b), 4);
}

void put_u64(std::ostream& os, std::uint64_t v) {
  put_u32(os, static_cast<std::uint32_t>(v));
  put_u32(os, static_cast<std::uint32_t>(v >> 32));
}

std::uint32_t get_u32(std::istream& is) {
  unsigned char b[4];
  is.read(reinterpret_cast<char*>(b), 4);
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

std::uint64_t get_u64(std::istream& is) {
  const std::uint64_t lo = get_u32(is);
  const std::uint64_t hi = get_u32(is);
  return lo | (hi << 32);
}

void check_finite(const Matrix& data, const std::string& context) {
  for (const double v : data.data()) {
    if (!std::isfinite(v)) throw DataError(context + ": non-finite sample");
  }
}

EegRecording load_binary(const fs::path& path, const ManifestEntry& entry) {
  std::ifstream in(path, std::ios::binary);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0) {
    throw DataError("load_recording: bad magic in " + path.string());
  }
  const std::uint32_t version = get_u32(in);
  if (version != kBinaryVersion) {
    throw DataError("load_recording: unsupported binary version " + std::to_string(version));
  }
  const std::uint32_t n_channels = get_u32(in);
  const std::uint64_t n_samples = get_u64(in);

  // Sidecar carries the metadata; the manifest entry must agree.
  const fs::path sidecar = path.string() + ".json";
  std::ifstream side(sidecar);
  if (!side) throw DataError("load_recording: missing sidecar " + sidecar.string());
  json meta = json::parse(side);

  EegRecording rec;
  rec.subject_id = meta.at("subject_id").get<std::string>();
  rec.label = label_from_string(meta.at("label").get<std::string>());
  rec.sample_rate_hz = meta.at("sample_rate_hz").get<double>();
  rec.channel_names = meta.at("channel_names").get<std::vector<std::string>>();

  if (rec.channel_names.size() != n_channels) {
    throw DataError("load_recording: sidecar channel count disagrees with binary header");
  }
  if (rec.channel_names != entry.channel_names) {
    throw DataError("load_recording: channel names disagree with manifest for " + entry.subject_id);
  }
  if (rec.subject_id != entry.subject_id) {
    throw DataError("load_recording: subject id disagrees with manifest");
  }

  rec.data = Matrix(n_channels, n_samples);
  std::vector<float> row(n_samples);
  for (std::uint32_t ch = 0; ch < n_channels; ++ch) {
    in.read(reinterpret_cast<char*>(row.data()),
            static_cast<std::streamsize>(n_samples * sizeof(float)));
    if (!in) throw DataError("load_recording: truncated data in " + path.string());
    double* dst = rec.data.row(ch);
    for (std::uint64_t s = 0; s < n_samples; ++s) dst[s] = static_cast<double>(row[s]);
  }
  check_finite(rec.data, "load_recording");
  return rec;
}

EegRecording load_csv(const fs::path& path, const ManifestEntry& entry) {
  std::ifstream in(path);
  std::string line;
  if (!std::getline(in, line)) throw DataError("load_recording: empty CSV " + path.string());

  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) header.push_back(cell);
  }
  if (header != entry.channel_names) {
    throw DataError("load_recording: CSV header disagrees with manifest for " + entry.subject_id);
  }

  std::vector<double> samples;  // sample-major, transposed below
  std::size_t n_rows = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::size_t col = 0;
    while (std::getline(ss, cell, ',')) {
      char* end = nullptr;
      const double v = std::strtod(cell.c_str(), &end);
      if (end == cell.c_str()) throw DataError("load_recording: unparseable CSV cell '" + cell + "'");
      if (!std::isfinite(v)) throw DataError("load_recording: non-finite sample");
      samples.push_back(v);
      ++col;
    }
    if (col != header.size()) throw DataError("load_recording: ragged CSV row");
    ++n_rows;
  }

  EegRecording rec;
  rec.subject_id = entry.subject_id;
  rec.label = entry.label;
  rec.sample_rate_hz = entry.sample_rate_hz;
  rec.channel_names = entry.channel_names;
  rec.data = Matrix(header.size(), n_rows);
  for (std::size_t s = 0; s < n_rows; ++s) {
    for (std::size_t ch = 0; ch < header.size(); ++ch) {
      rec.data(ch, s) = samples[s * header.size() + ch];
    }
  }
  return rec;
}

}  // namespace

EegRecording load_recording(const fs::path& path, const ManifestEntry& entry) {
  if (!fs::exists(path)) throw DataError("load_recording: missing file " + path.string());
  if (path.extension() == ".csv") return load_csv(path, entry);
  return load_binary(path, entry);
}

void save_recording(const fs::path& path, const EegRecording& rec) {
  check_finite(rec.data, "save_recording");
  if (rec.data.rows() != rec.channel_names.size()) {
    throw DataError("save_recording: channel name count disagrees with data rows");
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("save_recording: cannot open " + path.string());
  out.write(kMagic, 4);
  put_u32(out, kBinaryVersion);
  put_u32(out, static_cast<std::uint32_t>(rec.data.rows()));
  put_u64(out, rec.data.cols());
  std::vector<float> row(rec.data.cols());
  for (std::size_t ch = 0; ch < rec.data.rows(); ++ch) {
    const double* src = rec.data.row(ch);
    for (std::size_t s = 0; s < rec.data.cols(); ++s) row[s] = static_cast<float>(src[s]);
    out.write(reinterpret_cast<const char*>(row.data()),
              static_cast<std::streamsize>(row.size() * sizeof(float)));
  }

  json meta;
  meta["subject_id"] = rec.subject_id;
  meta["label"] = to_string(rec.label);
  meta["sample_rate_hz"] = rec.sample_rate_hz;
  meta["channel_names"] = rec.channel_names;
  std::ofstream side(path.string() + ".json");
  side << meta.dump(2) << "\n";
}

DatasetManifest load_manifest(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("load_manifest: missing file " + path.string());
  json doc = json::parse(in, nullptr, /*allow_exceptions=*/true);
  DatasetManifest manifest;
  manifest.format_version = doc.at("format_version").get<int>();
  if (manifest.format_version != 1) {
    throw DataError("load_manifest: unknown format_version " +
                    std::to_string(manifest.format_version));
  }
  for (const json& e : doc.at("entries")) {
    ManifestEntry entry;
    entry.path = e.at("path").get<std::string>();
    entry.subject_id = e.at("subject_id").get<std::string>();
    entry.label = label_from_string(e.at("label").get<std::string>());
    entry.sample_rate_hz = e.at("sample_rate_hz").get<double>();
    entry.channel_names = e.at("channel_names").get<std::vector<std::string>>();
    manifest.entries.push_back(std::move(entry));
  }
  // Invariants: shared montage, unique subjects.
  for (const ManifestEntry& e : manifest.entries) {
    if (e.channel_names != manifest.entries.front().channel_names) {
      throw DataError("load_manifest: entries disagree on channel names");
    }
  }
  std::vector<std::string> ids;
  for (const ManifestEntry& e : manifest.entries) ids.push_back(e.subject_id);
  std::sort(ids.begin(), ids.end());
  if (std::adjacent_find(ids.begin(), ids.end()) != ids.end()) {
    throw DataError("load_manifest: duplicate subject_id");
  }
  return manifest;
}

void save_manifest(const fs::path& path, const DatasetManifest& manifest) {
  json doc;
  doc["format_version"] = manifest.format_version;
  doc["entries"] = json::array();
  for (const ManifestEntry& e : manifest.entries) {
    json je;
    je["path"] = e.path;
    je["subject_id"] = e.subject_id;
    je["label"] = to_string(e.label);
    je["sample_rate_hz"] = e.sample_rate_hz;
    je["channel_names"] = e.channel_names;
    doc["entries"].push_back(std::move(je));
  }
  std::ofstream out(path);
  if (!out) throw DataError("save_manifest: cannot open " + path.string());
  out << doc.dump(2) << "\n";
}

namespace {

// 101-tap Hamming-windowed sinc low-pass, unit DC gain.
std::vector<double> lowpass_taps(double cutoff_hz, double fs_hz) {
  constexpr int kTaps = 101;
  constexpr int kHalf = kTaps / 2;
  const double pi = std::acos(-1.0);
  const double fc = cutoff_hz / fs_hz;  // cycles per sample
  std::vector<double> taps(kTaps);
  double sum = 0.0;
  for (int i = 0; i < kTaps; ++i) {
    const int m = i - kHalf;
    const double sinc = (m == 0) ? 2.0 * fc : std::sin(2.0 * pi * fc * m) / (pi * m);
    const double window = 0.54 - 0.46 * std::cos(2.0 * pi * i / (kTaps - 1));
    taps[i] = sinc * window;
    sum += taps[i];
  }
  for (double& t : taps) t /= sum;
  return taps;
}

// Forward-backward FIR equals one centered pass with the filter's
// autocorrelation; odd extension handles the ends.
void zero_phase_fir(const std::vector<double>& taps, const double* x, std::size_t len,
                    double* out) {
  const std::size_t half = taps.size() - 1;  // composite kernel half-width
  std::vector<double> composite(2 * taps.size() - 1, 0.0);
  for (std::size_t i = 0; i < taps.size(); ++i) {
    for (std::size_t j = 0; j < taps.size(); ++j) {
      composite[i + (taps.size() - 1 - j)] += taps[i] * taps[j];
    }
  }

  const auto sample = [&](std::ptrdiff_t idx) -> double {
    if (idx < 0) return 2.0 * x[0] - x[std::min<std::ptrdiff_t>(-idx, static_cast<std::ptrdiff_t>(len - 1))];
    if (idx >= static_cast<std::ptrdiff_t>(len)) {
      const std::ptrdiff_t over = idx - static_cast<std::ptrdiff_t>(len - 1);
      return 2.0 * x[len - 1] - x[len - 1 - std::min<std::ptrdiff_t>(over, static_cast<std::ptrdiff_t>(len - 1))];
    }
    return x[idx];
  };

  for (std::size_t t = 0; t < len; ++t) {
    double acc = 0.0;
    for (std::size_t j = 0; j < composite.size(); ++j) {
      acc += composite[j] * sample(static_cast<std::ptrdiff_t>(t + j) - static_cast<std::ptrdiff_t>(half));
    }
    out[t] = acc;
  }
}

}  // namespace

EegRecording resample(const EegRecording& rec, double target_hz) {
  if (target_hz >= rec.sample_rate_hz) {
    throw DataError("resample: target rate must be below the source rate");
  }
  const double ratio = rec.sample_rate_hz / target_hz;
  const std::size_t k = static_cast<std::size_t>(std::llround(ratio));
  if (std::abs(ratio - static_cast<double>(k)) > 1e-9) {
    throw DataError("resample: non-integer decimation");
  }

  const std::size_t n_in = rec.data.cols();
  const std::size_t n_out = n_in / k;
  const std::vector<double> taps = lowpass_taps(0.4 * target_hz, rec.sample_rate_hz);

  EegRecording out = rec;
  out.sample_rate_hz = target_hz;
  out.data = Matrix(rec.data.rows(), n_out);
  std::vector<double> filtered(n_in);
  for (std::size_t ch = 0; ch < rec.data.rows(); ++ch) {
    zero_phase_fir(taps, rec.data.row(ch), n_in, filtered.data());
    double* dst = out.data.row(ch);
    for (std::size_t i = 0; i < n_out; ++i) dst[i] = filtered[i * k];
  }
  return out;
}

EegRecording select_channels(const EegRecording& rec, const std::vector<std::string>& names) {
  EegRecording out;
  out.subject_id = rec.subject_id;
  out.label = rec.label;
  out.sample_rate_hz = rec.sample_rate_hz;
  out.channel_names = names;
  out.data = Matrix(names.size(), rec.data.cols());
  for (std::size_t i = 0; i < names.size(); ++i) {
    const auto it = std::find(rec.channel_names.begin(), rec.channel_names.end(), names[i]);
    if (it == rec.channel_names.end()) {
      throw DataError("select_channels: unknown channel '" + names[i] + "'");
    }
    const std::size_t src = static_cast<std::size_t>(it - rec.channel_names.begin());
    std::copy(rec.data.row(src), rec.data.row(src) + rec.data.cols(), out.data.row(i));
  }
  return out;
}

namespace {

void validate_synth_spec(const SynthSpec& spec) {
  if (spec.subjects_per_class < 1) throw DataError("synthesize_dataset: need >= 1 subject per class");
  if (spec.duration_s < 10.0) throw DataError("synthesize_dataset: duration must be >= 10 s");
  if (spec.sample_rate_hz <= 80.0) {
    throw DataError("synthesize_dataset: sample rate must exceed 80 Hz (Gamma band)");
  }
}

// Relative band power targets per class, Delta..Gamma. HC is alpha-dominant,
// AD raises delta+theta and suppresses alpha, FTD raises theta with an
// intermediate alpha.
constexpr std::array<std::array<double, 5>, 3> kClassBandPower = {{
    {0.6, 0.7, 2.5, 0.8, 0.35},   // HC
    {0.9, 2.3, 1.2, 0.6, 0.32},   // FTD
    {2.4, 1.8, 0.55, 0.55, 0.30}, // AD
}};

std::string subject_name(ClassLabel label, std::size_t index) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%s%02zu", to_string(label), index + 1);
  return buf;
}

}  // namespace

EegRecording synthesize_subject(const SynthSpec& spec, ClassLabel label,
                                std::size_t index_in_class) {
  validate_synth_spec(spec);
  const std::string sid = subject_name(label, index_in_class);
  Rng rng(mix_seed(spec.seed, "subject|" + sid));

  const std::size_t n = static_cast<std::size_t>(spec.duration_s * spec.sample_rate_hz);
  const std::size_t n_ch = standard_montage().size();
  const auto& profile = kClassBandPower[static_cast<std::size_t>(label)];

  // Per-subject jitter keeps subjects within a class distinct without
  // disturbing the class band-power orderings.
  const double subject_gain = rng.uniform(0.85, 1.15);
  std::array<double, 5> band_power;
  for (std::size_t b = 0; b < 5; ++b) {
    band_power[b] = profile[b] * subject_gain * rng.uniform(0.88, 1.12);
  }

  EegRecording rec;
  rec.subject_id = sid;
  rec.label = label;
  rec.sample_rate_hz = spec.sample_rate_hz;
  rec.channel_names = standard_montage();
  rec.data = Matrix(n_ch, n, 0.0);

  Matrix noise(1, n);
  Matrix filtered;
  for (std::size_t ch = 0; ch < n_ch; ++ch) {
    double* dst = rec.data.row(ch);
    for (std::size_t b = 0; b < 5; ++b) {
      for (std::size_t t = 0; t < n; ++t) noise(0, t) = rng.normal();
      filtered = bandpass_filter(noise, standard_bands()[b], spec.sample_rate_hz);
      double energy = 0.0;
      for (std::size_t t = 0; t < n; ++t) energy += filtered(0, t) * filtered(0, t);
      const double rms = std::sqrt(energy / static_cast<double>(n));
      const double target = std::sqrt(band_power[b] * rng.uniform(0.9, 1.1));
      const double scale = (rms > 0.0) ? target / rms : 0.0;
      for (std::size_t t = 0; t < n; ++t) dst[t] += scale * filtered(0, t);
    }
    // Broadband floor.
    for (std::size_t t = 0; t < n; ++t) dst[t] += 0.3 * rng.normal();
  }

  // Slow global gain drift, shared by all channels: negligible within short
  // segments, substantial within 256-second ones, and a pure common offset in
  // log band power.
  const double f1 = rng.uniform(0.012, 0.03);
  const double f2 = rng.uniform(0.03, 0.06);
  const double a1 = rng.uniform(0.25, 0.4);
  const double a2 = rng.uniform(0.15, 0.3);
  const double p1 = rng.uniform(0.0, 6.283185307179586);
  const double p2 = rng.uniform(0.0, 6.283185307179586);
  const double two_pi = 6.283185307179586476925286766559;
  for (std::size_t t = 0; t < n; ++t) {
    const double time_s = static_cast<double>(t) / spec.sample_rate_hz;
    const double g =
        20.0 * std::exp(a1 * std::sin(two_pi * f1 * time_s + p1) +
                        a2 * std::sin(two_pi * f2 * time_s + p2));
    for (std::size_t ch = 0; ch < n_ch; ++ch) rec.data(ch, t) *= g;
  }
  return rec;
}

DatasetManifest synthetic_manifest(const SynthSpec& spec) {
  validate_synth_spec(spec);
  DatasetManifest manifest;
  for (const ClassLabel label : {ClassLabel::HC, ClassLabel::FTD, ClassLabel::AD}) {
    for (std::size_t i = 0; i < spec.subjects_per_class; ++i) {
      ManifestEntry entry;
      entry.subject_id = subject_name(label, i);
      entry.path = entry.subject_id + ".eegs";
      entry.label = label;
      entry.sample_rate_hz = spec.sample_rate_hz;
      entry.channel_names = standard_montage();
      manifest.entries.push_back(std::move(entry));
    }
  }
  return manifest;
}

SynthDataset synthesize_dataset(const SynthSpec& spec) {
  SynthDataset out;
  out.manifest = synthetic_manifest(spec);
  for (const ManifestEntry& entry : out.manifest.entries) {
    const std::size_t index = out.recordings.size() % spec.subjects_per_class;
    out.recordings.push_back(synthesize_subject(spec, entry.label, index));
  }
  return out;
}

SubjectSplit split_dataset(const DatasetManifest& manifest, const std::array<double, 3>& ratios,
                           std::uint64_t seed) {
  const double sum = ratios[0] + ratios[1] + ratios[2];
  if (std::abs(sum - 1.0) > 1e-9) throw DataError("split_dataset: ratios must sum to 1");
  const std::size_t n = manifest.entries.size();
  if (n < 5) throw DataError("split_dataset: need at least 5 subjects");

  // Global bucket sizes by largest remainder, so the overall proportions stay
  // within one subject of the targets.
  std::array<std::size_t, 3> target{};
  {
    std::array<double, 3> quota;
    std::size_t assigned = 0;
    for (std::size_t s = 0; s < 3; ++s) {
      quota[s] = ratios[s] * static_cast<double>(n);
      target[s] = static_cast<std::size_t>(std::floor(quota[s]));
      assigned += target[s];
    }
    std::array<std::size_t, 3> order = {0, 1, 2};
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      const double ra = quota[a] - std::floor(quota[a]);
      const double rb = quota[b] - std::floor(quota[b]);
      return ra != rb ? ra > rb : a < b;
    });
    for (std::size_t i = 0; assigned < n; ++i, ++assigned) target[order[i % 3]] += 1;
  }

  // Shuffle within each class, then deal per class proportionally while
  // respecting the global bucket capacities.
  std::array<std::vector<std::string>, 3> by_class;
  for (const ManifestEntry& e : manifest.entries) {
    by_class[static_cast<std::size_t>(e.label)].push_back(e.subject_id);
  }
  Rng rng(mix_seed(seed, "split"));
  SubjectSplit split;
  std::array<std::vector<std::string>*, 3> buckets = {&split.train_ids, &split.val_ids,
                                                      &split.test_ids};
  std::array<std::size_t, 3> filled{};
  for (auto& ids : by_class) {
    for (std::size_t i = ids.size(); i > 1; --i) {
      std::swap(ids[i - 1], ids[rng.index(i)]);
    }
    const std::size_t m = ids.size();
    std::array<std::size_t, 3> take{};
    std::size_t assigned = 0;
    for (std::size_t s = 0; s < 3; ++s) {
      take[s] = static_cast<std::size_t>(std::floor(ratios[s] * static_cast<double>(m)));
      take[s] = std::min(take[s], target[s] - filled[s]);
      assigned += take[s];
    }
    while (assigned < m) {
      // Leftover subjects go to the bucket with the most remaining capacity
      // relative to its target.
      std::size_t best = 3;
      double best_gap = -1.0;
      for (std::size_t s = 0; s < 3; ++s) {
        if (filled[s] + take[s] >= target[s]) continue;
        const double gap = static_cast<double>(target[s] - filled[s] - take[s]) /
                           std::max(1.0, static_cast<double>(target[s]));
        if (gap > best_gap) {
          best_gap = gap;
          best = s;
        }
      }
      take[best] += 1;
      ++assigned;
    }
    std::size_t cursor = 0;
    for (std::size_t s = 0; s < 3; ++s) {
      for (std::size_t i = 0; i < take[s]; ++i) buckets[s]->push_back(ids[cursor++]);
      filled[s] += take[s];
    }
  }
  return split;
}

}  // namespace eegssm
