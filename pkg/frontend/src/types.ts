// Wire types for the session service. These mirror the JSON the engine
// serves; the client renders them and never derives anything itself.

export interface FromRecord {
  kind: 'external' | 'rule' | 'schema';
  source?: string;
  rule?: string;
  schema?: string;
  premises?: number[];
}

export interface EntryRecord {
  t: number;
  formula: string;
  from: FromRecord;
  to: number[];
  status: 'believed' | 'disbelieved';
  entrenchment: number;
  category: string;
}

export interface LinkRecord {
  from: string;
  to: string;
  type: 'object-kind' | 'subkind-kind' | 'has-property';
  created_at: number;
}

export interface NodeRecord {
  id: string;
  kind: 'object' | 'kind' | 'property';
  name: string;
  created_at: number;
  occurrence?: number;
  sign?: 'positive' | 'negative';
  addresses: number[][];
}

export interface HierarchyView {
  nodes: NodeRecord[];
  links: LinkRecord[];
}

export interface RevisionReport {
  trigger: number;
  culprits: number[];
  chosen: number[];
  cascade: number[];
}

export interface EventOutcome {
  accepted: boolean;
  reject_reason?: 'duplicate' | 'malformed' | 'loop' | 'redundant';
  reject_detail?: string;
  new_entries: number[];
  removed_links: LinkRecord[];
  revision?: RevisionReport;
  pending_choice?: number[];
}

export interface CulpritRow {
  t: number;
  formula: string;
  entrenchment: number;
}

export interface PendingView {
  pending: boolean;
  trigger?: number;
  culprits: CulpritRow[];
}
