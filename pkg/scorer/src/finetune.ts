import * as tf from '@tensorflow/tfjs';

import { DatasetRecord, labelSet } from './data';
import { FEATURE_DIM, featurizeBatch } from './features';
import { Artifact, ScorerConfig, buildModel } from './model';

export interface TrainOutcome {
  artifact: Artifact;
  bestValLoss: number;
  valAccuracy: number;
  epochsRun: number;
}

/** Deterministic in-place shuffle (mulberry32 PRNG). */
function seededShuffle<T>(items: T[], seed: number): T[] {
  let a = seed >>> 0;
  const rand = () => {
    a = (a + 0x6d2b79f5) >>> 0;
    let t = Math.imul(a ^ (a >>> 15), 1 | a);
    t = (t + Math.imul(t ^ (t >>> 7), 61 | t)) ^ t;
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
  for (let i = items.length - 1; i > 0; i--) {
    const j = Math.floor(rand() * (i + 1));
    [items[i], items[j]] = [items[j], items[i]];
  }
  return items;
}

function toTensors(records: DatasetRecord[], labels: string[]): { x: tf.Tensor2D; y: tf.Tensor2D } {
  const x = tf.tensor2d(featurizeBatch(records.map((r) => r.text)), [records.length, FEATURE_DIM]);
  const indices = records.map((r) => labels.indexOf(r.label));
  const y = tf.oneHot(tf.tensor1d(indices, 'int32'), labels.length) as tf.Tensor2D;
  return { x, y };
}

/**
 * Train a classifier on the training records, early-stopping on validation
 * loss and keeping the best-validation weights.
 *
 * Throws when train and validation label sets differ, or when the training
 * data carries fewer than two labels.
 */
export async function finetunePlain(
  train: DatasetRecord[],
  valid: DatasetRecord[],
  cfg: ScorerConfig,
): Promise<TrainOutcome> {
  const labels = labelSet(train);
  if (labels.length < 2) {
    throw new Error(`need at least 2 labels, got ${labels.length}`);
  }
  const validLabels = labelSet(valid);
  if (validLabels.some((l) => !labels.includes(l))) {
    throw new Error(`label-set mismatch: validation has [${validLabels}] vs train [${labels}]`);
  }

  const shuffled = seededShuffle([...train], cfg.seed + 1);
  const { x, y } = toTensors(shuffled, labels);
  const { x: vx, y: vy } = toTensors(valid, labels);

  const model = buildModel(cfg.modelIdentifier, labels.length, cfg.seed);
  model.compile({
    optimizer: tf.train.adam(cfg.learningRate),
    loss: 'categoricalCrossentropy',
    metrics: ['accuracy'],
  });

  const stepsPerEpoch = Math.ceil(train.length / cfg.batchSize);
  let bestValLoss = Infinity;
  let bestWeights: tf.Tensor[] | null = null;
  let iterationsSinceBest = 0;
  let epochsRun = 0;
  let stop = false;

  await model.fit(x, y, {
    epochs: cfg.epochs,
    batchSize: cfg.batchSize,
    shuffle: false, // pre-shuffled with a seeded PRNG for reproducibility
    validationData: [vx, vy],
    verbose: 0,
    callbacks: {
      onEpochEnd: async (_epoch, logs) => {
        epochsRun += 1;
        const valLoss = logs?.val_loss ?? Infinity;
        if (valLoss < bestValLoss) {
          bestValLoss = valLoss;
          bestWeights?.forEach((w) => w.dispose());
          bestWeights = model.getWeights().map((w) => w.clone());
          iterationsSinceBest = 0;
        } else {
          iterationsSinceBest += stepsPerEpoch;
          if (iterationsSinceBest >= cfg.earlyStopPatience) {
            stop = true;
            model.stopTraining = true;
          }
        }
      },
    },
  });
  void stop;

  if (bestWeights !== null) {
    model.setWeights(bestWeights);
  }
  const evalOut = model.evaluate(vx, vy, { batchSize: cfg.batchSize }) as tf.Scalar[];
  const valAccuracy = (await evalOut[1].data())[0];

  tf.dispose([x, y, vx, vy, ...evalOut]);
  return {
    artifact: { model, labels, featureDim: FEATURE_DIM, modelIdentifier: cfg.modelIdentifier },
    bestValLoss,
    valAccuracy,
    epochsRun,
  };
}
