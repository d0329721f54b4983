"""Drive the human-in-the-loop review service end to end, headlessly.

Samples frames from a synthetic clip, serves them with predicted boxes,
plays the annotator (accept one frame, correct another), exports corrected
labels, and shows that the export re-imports within rounding tolerance.
"""

import json
import tempfile
from pathlib import Path

from fastapi.testclient import TestClient

from framesift.ingest import frame_files, load_annotations, load_sequence
from framesift.review.service import create_app
from framesift.review.session import ReviewSession
from framesift.sampling import uniform_sample
from framesift.synthetic import generate_dataset

work = Path(tempfile.mkdtemp(prefix="framesift_demo_"))
ds = generate_dataset(work, n_frames=10, seed=4)
seq = load_sequence(ds.frames_dir)
plan = uniform_sample(len(seq), 0.5)
print(f"plan: every 2nd of {len(seq)} frames -> {list(plan.selected)}")

session = ReviewSession(
    plan=plan,
    sequence=seq,
    predictions=ds.predictions,
    journal_path=work / "journal.jsonl",
)
client = TestClient(
    create_app(session, frame_files(ds.frames_dir), export_dir=work / "export")
)

# The annotator asks for the next unreviewed frame and accepts the model's boxes.
frame = client.get("/api/next").json()["frame"]
boxes = client.get(f"/api/frames/{frame}/boxes").json()
print(f"\nframe {frame}: {len(boxes['predictions'])} predicted boxes, status={boxes['status']}")
client.post(f"/api/frames/{frame}/accept")
print(f"accepted frame {frame}")

# The next frame's prediction is off: replace it with hand-entered boxes.
frame = client.get("/api/next").json()["frame"]
corrected = [{"class_id": 0, "x_min": 5.0, "y_min": 18.0, "x_max": 21.0, "y_max": 29.0}]
client.post(f"/api/frames/{frame}/boxes", json={"boxes": corrected})
print(f"corrected frame {frame} with {len(corrected)} box(es)")

counts = client.get("/api/plan").json()["counts"]
print(f"progress: {counts}")

resp = client.post("/api/export").json()
print(f"\nexported {resp['manifest']['exported']} frames to {resp['out']}")
manifest = json.loads((work / "export" / "manifest.json").read_text())
for entry in manifest["frames"]:
    print(f"  frame {entry['frame']:2d} {entry['status']:9s} source={entry['source']}")

# Round-trip: the exported labels reload to the same boxes within 0.5 px.
loaded = load_annotations(work / "export", ds.width, ds.height, stems=seq.stems())
(got,) = loaded.for_frame(frame)
assert abs(got.box.x_min - 5.0) <= 0.5 and abs(got.box.y_max - 29.0) <= 0.5
print("\nexported labels reload within 0.5 px of the corrections")
