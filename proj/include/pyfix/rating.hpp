#pragma once

namespace pyfix {

// Expert judgment of one piece of feedback. `overall` is good only when all
// four aspects hold.
struct QualityRating {
  bool fix_ok = false;
  bool complete = false;
  bool correct = false;
  bool comprehensible = false;
  bool overall = false;
};

inline bool computed_overall(const QualityRating& r) {
  return r.fix_ok && r.complete && r.correct && r.comprehensible;
}

inline QualityRating make_rating(bool fix_ok, bool complete, bool correct, bool comprehensible) {
  QualityRating r;
  r.fix_ok = fix_ok;
  r.complete = complete;
  r.correct = correct;
  r.comprehensible = comprehensible;
  r.overall = computed_overall(r);
  return r;
}

}  // namespace pyfix
