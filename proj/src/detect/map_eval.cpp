#include "pvd/detect/map_eval.hpp"

#include <algorithm>
#include <fstream>
#include <nlohmann/json.hpp>

#include "pvd/core/errors.hpp"
#include "pvd/core/geometry.hpp"

namespace pvd {

namespace {

Category fold_ipc(Category c) { return c == Category::IPC ? Category::IPCCandidate : c; }

// AP as the area under the precision envelope: at each recall step take the
// best precision achieved at that recall or beyond.
double average_precision(std::vector<std::pair<double, bool>>& scored_hits, int num_gt) {
  if (num_gt == 0) return 0.0;
  // Stable sort so equal scores keep input order; determinism matters more
  // than which tie wins.
  std::stable_sort(scored_hits.begin(), scored_hits.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  std::vector<double> precision, recall;
  int tp = 0, fp = 0;
  for (const auto& [score, hit] : scored_hits) {
    (void)score;
    hit ? ++tp : ++fp;
    precision.push_back(double(tp) / (tp + fp));
    recall.push_back(double(tp) / num_gt);
  }
  double ap = 0.0, prev_recall = 0.0;
  for (std::size_t i = 0; i < precision.size(); ++i) {
    double peak = 0.0;
    for (std::size_t j = i; j < precision.size(); ++j) peak = std::max(peak, precision[j]);
    ap += (recall[i] - prev_recall) * peak;
    prev_recall = recall[i];
  }
  return ap;
}

}  // namespace

MapEvaluation evaluate_map(const std::vector<Detection>& detections,
                           const std::vector<Detection>& ground_truth) {
  MapEvaluation out;
  std::vector<Category> classes;
  for (const Detection& g : ground_truth) {
    const Category c = fold_ipc(g.box.category);
    if (std::find(classes.begin(), classes.end(), c) == classes.end()) classes.push_back(c);
  }
  if (classes.empty()) return out;
  std::sort(classes.begin(), classes.end());

  for (Category cls : classes) {
    std::vector<const Detection*> dets, gts;
    for (const Detection& d : detections)
      if (fold_ipc(d.box.category) == cls) dets.push_back(&d);
    for (const Detection& g : ground_truth)
      if (fold_ipc(g.box.category) == cls) gts.push_back(&g);
    std::stable_sort(dets.begin(), dets.end(),
                     [](const Detection* a, const Detection* b) { return a->box.score > b->box.score; });

    double class_ap = 0.0;
    for (int ti = 0; ti < 10; ++ti) {
      const double thresh = 0.50 + 0.05 * ti;
      std::vector<bool> taken(gts.size(), false);
      std::vector<std::pair<double, bool>> scored_hits;
      scored_hits.reserve(dets.size());
      for (const Detection* d : dets) {
        int best = -1;
        double best_iou = -1.0;
        for (std::size_t gi = 0; gi < gts.size(); ++gi) {
          if (taken[gi] || gts[gi]->frame != d->frame) continue;
          const double v = iou(d->box, gts[gi]->box);
          if (v >= thresh && v > best_iou) {
            best = int(gi);
            best_iou = v;
          }
        }
        if (best >= 0) taken[best] = true;
        scored_hits.push_back({d->box.score, best >= 0});
      }
      class_ap += average_precision(scored_hits, int(gts.size())) / 10.0;
    }
    out.per_class.push_back({cls, class_ap});
    out.map += class_ap / classes.size();
  }
  return out;
}

void write_detections_jsonl(const std::string& path, const std::vector<Detection>& detections) {
  std::ofstream f(path);
  if (!f) throw DomainError("write_detections_jsonl: cannot open " + path);
  for (const Detection& d : detections) {
    nlohmann::ordered_json j;
    j["frame"] = d.frame;
    j["box"] = {d.box.x_min, d.box.y_min, d.box.x_max, d.box.y_max};
    j["category"] = to_string(d.box.category);
    j["score"] = d.box.score;
    f << j.dump() << "\n";
  }
}

std::vector<Detection> read_detections_jsonl(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw DomainError("read_detections_jsonl: cannot open " + path);
  std::vector<Detection> out;
  std::string line;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    const nlohmann::json j = nlohmann::json::parse(line);
    Detection d;
    d.frame = j.at("frame").get<int>();
    const auto& b = j.at("box");
    d.box.x_min = b.at(0).get<double>();
    d.box.y_min = b.at(1).get<double>();
    d.box.x_max = b.at(2).get<double>();
    d.box.y_max = b.at(3).get<double>();
    d.box.category = category_from_string(j.at("category").get<std::string>());
    d.box.score = j.at("score").get<double>();
    out.push_back(d);
  }
  return out;
}

}  // namespace pvd
