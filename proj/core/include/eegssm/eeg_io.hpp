#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "eegssm/matrix.hpp"

namespace eegssm {

/// Class index order is fixed everywhere: HC=0, FTD=1, AD=2.
enum class ClassLabel : int { HC = 0, FTD = 1, AD = 2 };

const char* to_string(ClassLabel label);
ClassLabel label_from_string(const std::string& name);

/// One subject's multichannel recording. data is channels x samples in
/// microvolts; rows match channel_names.
struct EegRecording {
  std::string subject_id;
  ClassLabel label = ClassLabel::HC;
  double sample_rate_hz = 0.0;
  std::vector<std::string> channel_names;
  Matrix data;

  double duration_s() const {
    return static_cast<double>(data.cols()) / sample_rate_hz;
  }
};

struct ManifestEntry {
  std::string path;  // relative to the manifest's directory
  std::string subject_id;
  ClassLabel label = ClassLabel::HC;
  double sample_rate_hz = 0.0;
  std::vector<std::string> channel_names;
};

struct DatasetManifest {
  int format_version = 1;
  std::vector<ManifestEntry> entries;
};

/// Disjoint subject-level partition covering all subjects.
struct SubjectSplit {
  std::vector<std::string> train_ids;
  std::vector<std::string> val_ids;
  std::vector<std::string> test_ids;
};

/// The 19-channel 10-20 montage the reference dataset uses.
const std::vector<std::string>& standard_montage();

/// Reads a recording from either the documented binary format ("EEGS" magic,
/// little-endian f32, JSON sidecar) or CSV with a channel-name header row.
/// Samples are widened to f64 bit-for-bit. Rejects non-finite values and any
/// mismatch against the manifest entry.
EegRecording load_recording(const std::filesystem::path& path, const ManifestEntry& entry);

/// Writes the binary format plus its `<file>.json` sidecar.
void save_recording(const std::filesystem::path& path, const EegRecording& rec);

DatasetManifest load_manifest(const std::filesystem::path& path);
void save_manifest(const std::filesystem::path& path, const DatasetManifest& manifest);

/// Integer-factor decimation with a zero-phase FIR anti-alias low-pass
/// (101-tap Hamming-windowed sinc, cutoff 0.8x the target Nyquist).
EegRecording resample(const EegRecording& rec, double target_hz);

/// Row subset/reorder to the requested names; all else unchanged.
EegRecording select_channels(const EegRecording& rec, const std::vector<std::string>& names);

struct SynthSpec {
  std::size_t subjects_per_class = 10;
  double duration_s = 60.0;
  double sample_rate_hz = 500.0;
  std::uint64_t seed = 42;
};

struct SynthDataset {
  std::vector<EegRecording> recordings;
  DatasetManifest manifest;  // paths follow the `<subject_id>.eegs` convention
};

/// Deterministic synthetic cohort. Each recording is a sum of band-limited
/// noise whose per-band power ratios are class-conditional (HC alpha-dominant;
/// AD raised delta+theta with suppressed alpha; FTD raised theta) plus a white
/// floor, per-subject gain jitter, and a slow global gain drift.
SynthDataset synthesize_dataset(const SynthSpec& spec);

/// Synthesize a single subject deterministically (used to keep peak memory
/// low when building large datasets).
EegRecording synthesize_subject(const SynthSpec& spec, ClassLabel label, std::size_t index_in_class);
DatasetManifest synthetic_manifest(const SynthSpec& spec);

/// Stratified subject-level split, deterministic per seed. Ratios must sum
/// to 1 within 1e-9; proportions land within one subject of the targets.
SubjectSplit split_dataset(const DatasetManifest& manifest, const std::array<double, 3>& ratios,
                           std::uint64_t seed);

}  // namespace eegssm
