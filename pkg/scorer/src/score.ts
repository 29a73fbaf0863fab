import * as fs from 'node:fs';
import * as tf from '@tensorflow/tfjs';

import { ConfidenceRecord, ScoringRequest } from './data';
import { featurizeBatch } from './features';
import { Artifact } from './model';

export interface ScoreOutput {
  confidences: ConfidenceRecord[];
  /** full per-label distributions, populated in debug mode */
  distributions?: { augId: string; probs: Record<string, number> }[];
}

/**
 * Score each request with the model's probability mass on its stated label.
 * Unknown labels are a hard error; an empty request list yields empty output.
 */
export async function score(
  artifact: Artifact,
  requests: ScoringRequest[],
  debug = false,
): Promise<ScoreOutput> {
  for (const r of requests) {
    if (!artifact.labels.includes(r.label)) {
      throw new Error(`request ${r.augId}: unknown label ${JSON.stringify(r.label)}`);
    }
  }
  if (requests.length === 0) {
    return { confidences: [], distributions: debug ? [] : undefined };
  }

  const x = tf.tensor2d(featurizeBatch(requests.map((r) => r.text), artifact.featureDim), [
    requests.length,
    artifact.featureDim,
  ]);
  const probs = artifact.model.predict(x) as tf.Tensor2D;
  const rows = (await probs.array()) as number[][];
  tf.dispose([x, probs]);

  const confidences = requests.map((r, i) => ({
    augId: r.augId,
    probTrueLabel: rows[i][artifact.labels.indexOf(r.label)],
  }));
  if (!debug) {
    return { confidences };
  }
  const distributions = requests.map((r, i) => ({
    augId: r.augId,
    probs: Object.fromEntries(artifact.labels.map((label, j) => [label, rows[i][j]])),
  }));
  return { confidences, distributions };
}

export function writeDistributions(
  distributions: { augId: string; probs: Record<string, number> }[],
  path: string,
): void {
  const lines = distributions.map((d) => JSON.stringify(d));
  fs.writeFileSync(path, lines.length ? lines.join('\n') + '\n' : '');
}
