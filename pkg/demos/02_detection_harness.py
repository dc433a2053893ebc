"""
Sliding windows, pyramids and scoring
=====================================

The detection harness never touches pixels. A classifier is any function of
``(image_id, window)``; here a fake one "sees" the landmark in a fixed window
of some images, with a few deliberate mistakes.
"""

# %%
from pharos.detection import (ClassifierContract, ImageDims, build_pyramid, enumerate_windows,
                              evaluate, evaluate_grouped, image_contains_landmark)

dims = ImageDims(1024, 768)
for level in build_pyramid(dims):
    ws = enumerate_windows(level.dims, level_index=level.level_index, scale=level.scale)
    print(f"level {level.level_index}: {level.dims.width_px}x{level.dims.height_px}, {len(ws)} windows")

# %%
truth = {f"img{k:03d}": k % 4 == 0 for k in range(200)}
flipped = {"img001", "img008", "img050"}


def score(image_id, window):
    says_yes = truth[image_id] != (image_id in flipped)
    if says_yes and window.level_index == 1 and window.x_px == 128:
        return 0.8
    return 0.1


clf = ClassifierContract(score, threshold=0.5)
pairs = [(image_contains_landmark(clf, i, dims), truth[i]) for i in truth]
counts = evaluate(pairs)
print(counts)
print(counts.report_json(), end="")

# %%
# Pool two regions of interest: micro-average over all images
rois = {"north": pairs[:120], "south": pairs[120:]}
print(evaluate_grouped(rois).report())
