import * as fs from 'node:fs';
import * as path from 'node:path';
import * as tf from '@tensorflow/tfjs';

import { FEATURE_DIM } from './features';

export interface ScorerConfig {
  modelIdentifier: string;
  batchSize: number;
  learningRate: number;
  epochs: number;
  earlyStopPatience: number; // iterations without validation-loss improvement
  seed: number;
}

export const DEFAULT_CONFIG: ScorerConfig = {
  modelIdentifier: 'bow-mlp',
  batchSize: 32,
  learningRate: 1e-5,
  epochs: 10,
  earlyStopPatience: 500,
  seed: 0,
};

export interface Artifact {
  model: tf.LayersModel;
  labels: string[];
  featureDim: number;
  modelIdentifier: string;
}

export function buildModel(identifier: string, nLabels: number, seed: number): tf.LayersModel {
  const model = tf.sequential();
  if (identifier === 'bow-mlp') {
    model.add(
      tf.layers.dense({
        inputShape: [FEATURE_DIM],
        units: 64,
        activation: 'relu',
        kernelInitializer: tf.initializers.glorotUniform({ seed }),
      }),
    );
    model.add(
      tf.layers.dense({
        units: nLabels,
        activation: 'softmax',
        kernelInitializer: tf.initializers.glorotUniform({ seed: seed + 1 }),
      }),
    );
  } else if (identifier === 'bow-logreg') {
    model.add(
      tf.layers.dense({
        inputShape: [FEATURE_DIM],
        units: nLabels,
        activation: 'softmax',
        kernelInitializer: tf.initializers.glorotUniform({ seed }),
      }),
    );
  } else {
    throw new Error(`unknown model identifier: ${identifier}`);
  }
  return model;
}

/** Persist the model as plain JSON (topology id + weights) next to its label vocabulary. */
export async function saveArtifact(artifact: Artifact, dir: string): Promise<void> {
  fs.mkdirSync(dir, { recursive: true });
  const weights = artifact.model.getWeights().map((w) => ({
    shape: w.shape,
    values: Array.from(w.dataSync()),
  }));
  fs.writeFileSync(
    path.join(dir, 'artifact.json'),
    JSON.stringify(
      {
        modelIdentifier: artifact.modelIdentifier,
        labels: artifact.labels,
        featureDim: artifact.featureDim,
        weights,
      },
      null,
      0,
    ),
  );
}

export async function loadArtifact(dir: string): Promise<Artifact> {
  const raw = JSON.parse(fs.readFileSync(path.join(dir, 'artifact.json'), 'utf-8'));
  const model = buildModel(raw.modelIdentifier, raw.labels.length, 0);
  model.setWeights(raw.weights.map((w: any) => tf.tensor(w.values, w.shape)));
  return {
    model,
    labels: raw.labels,
    featureDim: raw.featureDim,
    modelIdentifier: raw.modelIdentifier,
  };
}
