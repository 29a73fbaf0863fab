import * as fs from 'node:fs';

export interface DatasetRecord {
  id: string;
  text: string;
  label: string;
}

export interface ScoringRequest {
  augId: string;
  text: string;
  label: string;
}

export interface ConfidenceRecord {
  augId: string;
  probTrueLabel: number;
}

function readJsonl(path: string): any[] {
  const raw = fs.readFileSync(path, 'utf-8');
  const rows: any[] = [];
  for (const line of raw.split('\n')) {
    if (!line.trim()) continue;
    rows.push(JSON.parse(line));
  }
  return rows;
}

export function readDataset(path: string): DatasetRecord[] {
  return readJsonl(path).map((r, i) => {
    if (r.id === undefined || r.text === undefined || r.label === undefined) {
      throw new Error(`dataset line ${i + 1}: need id, text, label`);
    }
    return { id: String(r.id), text: String(r.text), label: String(r.label) };
  });
}

export function readRequests(path: string): ScoringRequest[] {
  return readJsonl(path).map((r, i) => {
    if (r.augId === undefined || r.text === undefined || r.label === undefined) {
      throw new Error(`request line ${i + 1}: need augId, text, label`);
    }
    return { augId: String(r.augId), text: String(r.text), label: String(r.label) };
  });
}

export function writeConfidences(records: ConfidenceRecord[], path: string): void {
  const lines = records.map((r) => JSON.stringify({ augId: r.augId, probTrueLabel: r.probTrueLabel }));
  fs.writeFileSync(path, lines.length ? lines.join('\n') + '\n' : '');
}

export function labelSet(records: DatasetRecord[]): string[] {
  return [...new Set(records.map((r) => r.label))].sort();
}
