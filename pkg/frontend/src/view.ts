// DOM rendering. Every function takes the document (and target nodes)
// explicitly so the same code runs in the browser and under jsdom.

import type {
  EntryRecord,
  EventOutcome,
  HierarchyView,
  NodeRecord,
  PendingView,
} from './types.js';

const SVG_NS = 'http://www.w3.org/2000/svg';

export function renderBeliefTable(
  doc: Document,
  tbody: HTMLElement,
  entries: EntryRecord[],
  highlight: Set<number>,
  onInspect: (t: number) => void,
): void {
  tbody.textContent = '';
  for (const entry of entries) {
    const row = doc.createElement('tr');
    row.dataset.t = String(entry.t);
    row.className = entry.status === 'disbelieved' ? 'disbelieved' : '';
    if (highlight.has(entry.t)) row.classList.add('fresh');
    const cells = [
      String(entry.t),
      entry.formula,
      entry.status,
      entry.entrenchment.toFixed(2),
      entry.category,
    ];
    for (const text of cells) {
      const td = doc.createElement('td');
      td.textContent = text;
      row.appendChild(td);
    }
    row.addEventListener('click', () => onInspect(entry.t));
    tbody.appendChild(row);
  }
}

function describeFrom(entry: EntryRecord): string {
  const from = entry.from;
  if (from.kind === 'external') {
    return `external source (es)${from.source ? `, ${from.source}` : ''}`;
  }
  if (from.kind === 'schema') {
    return `schema ${from.schema}`;
  }
  return `rule ${from.rule}`;
}

export function renderEntryDetail(
  doc: Document,
  container: HTMLElement,
  entry: EntryRecord,
  onInspect: (t: number) => void,
): void {
  container.textContent = '';
  const title = doc.createElement('h3');
  title.textContent = `Entry ${entry.t}`;
  container.appendChild(title);

  const addRow = (label: string, fill: (dd: HTMLElement) => void) => {
    const dt = doc.createElement('dt');
    dt.textContent = label;
    const dd = doc.createElement('dd');
    fill(dd);
    list.appendChild(dt);
    list.appendChild(dd);
  };
  const list = doc.createElement('dl');

  addRow('formula', (dd) => (dd.textContent = entry.formula));
  addRow('from', (dd) => {
    dd.appendChild(doc.createTextNode(describeFrom(entry)));
    for (const premise of entry.from.premises ?? []) {
      dd.appendChild(doc.createTextNode(' '));
      const link = doc.createElement('a');
      link.href = '#';
      link.textContent = `[${premise}]`;
      link.addEventListener('click', (event) => {
        event.preventDefault();
        onInspect(premise);
      });
      dd.appendChild(link);
    }
  });
  addRow('to', (dd) => {
    if (entry.to.length === 0) {
      dd.textContent = '(none)';
      return;
    }
    for (const dependent of entry.to) {
      const link = doc.createElement('a');
      link.href = '#';
      link.textContent = `[${dependent}] `;
      link.addEventListener('click', (event) => {
        event.preventDefault();
        onInspect(dependent);
      });
      dd.appendChild(link);
    }
  });
  addRow('status', (dd) => (dd.textContent = entry.status));
  addRow('entrenchment', (dd) => (dd.textContent = String(entry.entrenchment)));
  addRow('category', (dd) => (dd.textContent = entry.category));
  container.appendChild(list);
}

function nodeLabel(node: NodeRecord): string {
  if (node.kind === 'property') {
    const sign = node.sign === 'negative' ? '~' : '';
    return `${sign}${node.name}#${node.occurrence}`;
  }
  return node.name;
}

function nodeDepth(node: NodeRecord, view: HierarchyView): number {
  if (node.kind === 'property') {
    const attachment = view.links.find(
      (l) => l.type === 'has-property' && l.to === node.id,
    );
    const kind = view.nodes.find((n) => n.id === attachment?.from);
    return kind ? nodeDepth(kind, view) : 1;
  }
  let depth = 1;
  for (const address of node.addresses) {
    depth = Math.max(depth, address.length);
  }
  return depth;
}

/** Layered drawing: roots at the top, objects at the bottom, property
 * nodes beside the kind they attach to. */
export function renderHierarchy(
  doc: Document,
  container: HTMLElement,
  view: HierarchyView,
): void {
  container.textContent = '';
  const svg = doc.createElementNS(SVG_NS, 'svg');
  const okNodes = view.nodes.filter((n) => n.kind !== 'property');
  const maxDepth = Math.max(1, ...okNodes.map((n) => nodeDepth(n, view)));

  // objects always sit on the bottom row, kinds at their address depth
  const layerOf = (node: NodeRecord): number =>
    node.kind === 'object' ? maxDepth : nodeDepth(node, view);

  const layers = new Map<number, NodeRecord[]>();
  for (const node of okNodes) {
    const layer = layerOf(node);
    if (!layers.has(layer)) layers.set(layer, []);
    layers.get(layer)!.push(node);
  }
  const positions = new Map<string, { x: number; y: number }>();
  const width = 560;
  const rowHeight = 80;
  for (const [layer, nodes] of layers) {
    nodes.sort((a, b) => a.created_at - b.created_at);
    nodes.forEach((node, i) => {
      positions.set(node.id, {
        x: ((i + 1) * width) / (nodes.length + 1),
        y: 40 + (layer - 1) * rowHeight,
      });
    });
  }
  // properties sit to the right of their kind
  for (const link of view.links) {
    if (link.type !== 'has-property') continue;
    const kindPos = positions.get(link.from);
    if (!kindPos) continue;
    const taken = [...positions.values()].filter(
      (p) => p.y === kindPos.y && p.x > kindPos.x,
    ).length;
    positions.set(link.to, {
      x: kindPos.x + 90 + taken * 10,
      y: kindPos.y,
    });
  }

  const height = 40 + maxDepth * rowHeight;
  svg.setAttribute('viewBox', `0 0 ${width + 160} ${height}`);
  svg.setAttribute('width', '100%');

  for (const link of view.links) {
    const a = positions.get(link.from);
    const b = positions.get(link.to);
    if (!a || !b) continue;
    const line = doc.createElementNS(SVG_NS, 'line');
    line.setAttribute('x1', String(a.x));
    line.setAttribute('y1', String(a.y));
    line.setAttribute('x2', String(b.x));
    line.setAttribute('y2', String(b.y));
    line.setAttribute('class', `link ${link.type}`);
    svg.appendChild(line);
  }

  for (const node of view.nodes) {
    const pos = positions.get(node.id);
    if (!pos) continue;
    const group = doc.createElementNS(SVG_NS, 'g');
    group.setAttribute('data-node', node.id);
    if (node.kind === 'object') {
      const rect = doc.createElementNS(SVG_NS, 'rect');
      rect.setAttribute('x', String(pos.x - 38));
      rect.setAttribute('y', String(pos.y - 14));
      rect.setAttribute('width', '76');
      rect.setAttribute('height', '28');
      rect.setAttribute('class', 'object');
      group.appendChild(rect);
    } else if (node.kind === 'kind') {
      const ellipse = doc.createElementNS(SVG_NS, 'ellipse');
      ellipse.setAttribute('cx', String(pos.x));
      ellipse.setAttribute('cy', String(pos.y));
      ellipse.setAttribute('rx', '44');
      ellipse.setAttribute('ry', '17');
      ellipse.setAttribute('class', 'kind');
      group.appendChild(ellipse);
    }
    const text = doc.createElementNS(SVG_NS, 'text');
    text.setAttribute('x', String(pos.x));
    text.setAttribute('y', String(pos.y + 4));
    text.setAttribute('text-anchor', 'middle');
    text.textContent = nodeLabel(node);
    group.appendChild(text);
    svg.appendChild(group);
  }
  container.appendChild(svg);
}

export function renderTrace(
  doc: Document,
  container: HTMLElement,
  outcome: EventOutcome | null,
  error?: string,
): void {
  container.textContent = '';
  const line = doc.createElement('div');
  if (error) {
    line.className = 'banner error';
    line.textContent = error;
  } else if (outcome === null) {
    line.textContent = 'no inputs yet';
  } else if (!outcome.accepted) {
    line.className = 'banner rejected';
    line.textContent = `rejected: ${outcome.reject_reason}`;
    line.title = outcome.reject_detail ?? '';
  } else {
    line.className = 'banner accepted';
    const bits = [`entered ${outcome.new_entries.length} entrie(s)`];
    if (outcome.removed_links.length > 0) {
      bits.push(`${outcome.removed_links.length} link(s) removed`);
    }
    if (outcome.revision) {
      bits.push(`revision cascade [${outcome.revision.cascade.join(', ')}]`);
    }
    if (outcome.pending_choice) {
      bits.push('contradiction: choose what to retract');
    }
    line.textContent = bits.join('; ');
  }
  container.appendChild(line);
}

export function renderPendingModal(
  doc: Document,
  modal: HTMLElement,
  culpritsBody: HTMLElement,
  pending: PendingView,
): void {
  modal.classList.toggle('open', pending.pending);
  culpritsBody.textContent = '';
  if (!pending.pending) return;
  for (const culprit of pending.culprits) {
    const row = doc.createElement('tr');
    const checkCell = doc.createElement('td');
    const checkbox = doc.createElement('input');
    checkbox.type = 'checkbox';
    checkbox.value = String(culprit.t);
    checkbox.className = 'culprit-check';
    checkCell.appendChild(checkbox);
    row.appendChild(checkCell);
    for (const text of [
      String(culprit.t),
      culprit.formula,
      culprit.entrenchment.toFixed(2),
    ]) {
      const td = doc.createElement('td');
      td.textContent = text;
      row.appendChild(td);
    }
    culpritsBody.appendChild(row);
  }
}

export function selectedCulprits(modal: HTMLElement): number[] {
  const boxes = modal.querySelectorAll<HTMLInputElement>('.culprit-check');
  const chosen: number[] = [];
  boxes.forEach((box) => {
    if (box.checked) chosen.push(Number(box.value));
  });
  return chosen;
}
