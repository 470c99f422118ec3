#include "eegssm/segmentation.hpp"

#include <cmath>
#include <stdexcept>

#include "eegssm/errors.hpp"

namespace eegssm {

SegmentBatch segment(const EegRecording& rec, double seg_seconds) {
  if (seg_seconds <= 0.0) throw std::invalid_argument("segment: seg_seconds must be > 0");
  const std::size_t n_seq =
      static_cast<std::size_t>(std::llround(seg_seconds * rec.sample_rate_hz));
  if (n_seq == 0 || rec.data.cols() < n_seq) {
    throw DataError("segment: recording shorter than one segment");
  }
  const std::size_t n_seg = rec.data.cols() / n_seq;

  SegmentBatch batch;
  batch.seg_seconds = seg_seconds;
  batch.sample_rate_hz = rec.sample_rate_hz;
  batch.data.reserve(n_seg);
  for (std::size_t j = 0; j < n_seg; ++j) {
    Matrix seg(rec.data.rows(), n_seq);
    for (std::size_t ch = 0; ch < rec.data.rows(); ++ch) {
      const double* src = rec.data.row(ch) + j * n_seq;
      std::copy(src, src + n_seq, seg.row(ch));
    }
    batch.data.push_back(std::move(seg));
    batch.labels.push_back(rec.label);
    batch.subject_ids.push_back(rec.subject_id);
  }
  return batch;
}

void append(SegmentBatch& dst, SegmentBatch&& src) {
  if (dst.data.empty()) {
    dst = std::move(src);
    return;
  }
  if (dst.seg_seconds != src.seg_seconds || dst.sample_rate_hz != src.sample_rate_hz) {
    throw std::invalid_argument("append: segment geometry mismatch");
  }
  for (auto& m : src.data) dst.data.push_back(std::move(m));
  dst.labels.insert(dst.labels.end(), src.labels.begin(), src.labels.end());
  dst.subject_ids.insert(dst.subject_ids.end(), src.subject_ids.begin(), src.subject_ids.end());
}

SegmentBatch segment_dataset(const std::vector<EegRecording>& recordings, double seg_seconds) {
  SegmentBatch all;
  for (const EegRecording& rec : recordings) {
    append(all, segment(rec, seg_seconds));
  }
  return all;
}

SegmentBatch project_patches(const SegmentBatch& batch, const std::optional<Matrix>& projection) {
  if (!projection.has_value()) return batch;
  const Matrix& proj = *projection;
  if (!batch.data.empty() && batch.data.front().cols() != proj.rows()) {
    throw std::invalid_argument("project_patches: projection shape mismatch");
  }
  SegmentBatch out = batch;
  for (std::size_t i = 0; i < batch.data.size(); ++i) {
    const Matrix& patch = batch.data[i];
    Matrix result(patch.rows(), proj.cols(), 0.0);
    for (std::size_t r = 0; r < patch.rows(); ++r) {
      const double* prow = patch.row(r);
      double* orow = result.row(r);
      for (std::size_t k = 0; k < patch.cols(); ++k) {
        const double v = prow[k];
        if (v == 0.0) continue;
        const double* srow = proj.row(k);
        for (std::size_t c = 0; c < proj.cols(); ++c) orow[c] += v * srow[c];
      }
    }
    out.data[i] = std::move(result);
  }
  return out;
}

}  // namespace eegssm
