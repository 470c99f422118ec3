#pragma once

#include <optional>
#include <string>
#include <vector>

#include "eegssm/eeg_io.hpp"
#include "eegssm/matrix.hpp"

namespace eegssm {

/// Fixed-length multivariate segments. data[i] is channels x samples; every
/// segment carries the label and subject of its source recording. Segments
/// are contiguous, non-overlapping and in temporal order per subject.
struct SegmentBatch {
  std::vector<Matrix> data;
  double seg_seconds = 0.0;
  double sample_rate_hz = 0.0;
  std::vector<ClassLabel> labels;
  std::vector<std::string> subject_ids;

  std::size_t size() const { return data.size(); }
};

/// Cuts a recording into floor(N_samples / N_seq) segments with
/// N_seq = round(seg_seconds * sample_rate_hz); the tail remainder is
/// discarded. Errors if the recording is shorter than one segment.
SegmentBatch segment(const EegRecording& rec, double seg_seconds);

/// Segments every recording in order and concatenates the batches.
SegmentBatch segment_dataset(const std::vector<EegRecording>& recordings, double seg_seconds);

void append(SegmentBatch& dst, SegmentBatch&& src);

/// Right-multiplies every patch by the projection; nullopt is the identity
/// marker and returns the input unchanged.
SegmentBatch project_patches(const SegmentBatch& batch, const std::optional<Matrix>& projection);

}  // namespace eegssm
