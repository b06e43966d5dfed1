/** Horizontal person-location-time track: TIME ticks ascending, locations
 * attached under each tick; clicking a location lists its provenance
 * documents. */

import type { TimelineTick } from "./viewmodel";

export function renderTimeline(
  container: HTMLElement,
  ticks: TimelineTick[],
  person: string,
): void {
  container.innerHTML = "";
  if (ticks.length === 0) {
    const notice = document.createElement("p");
    notice.className = "notice";
    notice.textContent = `no PHYS evidence for this person: ${person}`;
    container.append(notice);
    return;
  }
  const track = document.createElement("div");
  track.className = "timeline-track";
  for (const tick of ticks) {
    const column = document.createElement("div");
    column.className = "timeline-tick";
    const label = document.createElement("div");
    label.className = "timeline-time";
    label.textContent = tick.time;
    column.append(label);
    for (const location of tick.locations) {
      const chip = document.createElement("button");
      chip.className = "timeline-loc";
      chip.textContent =
        location.count > 1 ? `${location.name} (${location.count})` : location.name;
      chip.addEventListener("click", () => {
        const existing = column.querySelector(".timeline-docs");
        if (existing) {
          existing.remove();
          return;
        }
        const docs = document.createElement("ul");
        docs.className = "timeline-docs";
        for (const docId of location.docIds) {
          const item = document.createElement("li");
          item.textContent = docId;
          docs.append(item);
        }
        column.append(docs);
      });
      column.append(chip);
    }
    track.append(column);
  }
  container.append(track);
}
