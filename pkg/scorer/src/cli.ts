#!/usr/bin/env node
import { parseArgs } from 'node:util';

import { readDataset, readRequests, writeConfidences } from './data';
import { finetunePlain } from './finetune';
import { DEFAULT_CONFIG, loadArtifact, saveArtifact } from './model';
import { score, writeDistributions } from './score';

function usage(): never {
  console.error(
    [
      'usage:',
      '  scorer finetune --train <jsonl> --valid <jsonl> --out <dir> [--model bow-mlp|bow-logreg]',
      '                  [--batch-size 32] [--learning-rate 1e-5] [--epochs 10] [--patience 500] [--seed 0]',
      '  scorer score    --model-dir <dir> --requests <jsonl> --out <jsonl> [--debug <jsonl>]',
    ].join('\n'),
  );
  process.exit(2);
}

export async function main(argv: string[]): Promise<number> {
  const command = argv[0];
  if (command === 'finetune') {
    const { values } = parseArgs({
      args: argv.slice(1),
      options: {
        train: { type: 'string' },
        valid: { type: 'string' },
        out: { type: 'string' },
        model: { type: 'string', default: DEFAULT_CONFIG.modelIdentifier },
        'batch-size': { type: 'string', default: String(DEFAULT_CONFIG.batchSize) },
        'learning-rate': { type: 'string', default: String(DEFAULT_CONFIG.learningRate) },
        epochs: { type: 'string', default: String(DEFAULT_CONFIG.epochs) },
        patience: { type: 'string', default: String(DEFAULT_CONFIG.earlyStopPatience) },
        seed: { type: 'string', default: '0' },
      },
    });
    if (!values.train || !values.valid || !values.out) usage();
    const outcome = await finetunePlain(readDataset(values.train), readDataset(values.valid), {
      modelIdentifier: values.model!,
      batchSize: Number(values['batch-size']),
      learningRate: Number(values['learning-rate']),
      epochs: Number(values.epochs),
      earlyStopPatience: Number(values.patience),
      seed: Number(values.seed),
    });
    await saveArtifact(outcome.artifact, values.out);
    console.log(
      JSON.stringify({
        valAccuracy: outcome.valAccuracy,
        bestValLoss: outcome.bestValLoss,
        epochsRun: outcome.epochsRun,
        out: values.out,
      }),
    );
    return 0;
  }
  if (command === 'score') {
    const { values } = parseArgs({
      args: argv.slice(1),
      options: {
        'model-dir': { type: 'string' },
        requests: { type: 'string' },
        out: { type: 'string' },
        debug: { type: 'string' },
      },
    });
    if (!values['model-dir'] || !values.requests || !values.out) usage();
    const artifact = await loadArtifact(values['model-dir']);
    const requests = readRequests(values.requests);
    const result = await score(artifact, requests, Boolean(values.debug));
    writeConfidences(result.confidences, values.out);
    if (values.debug && result.distributions) {
      writeDistributions(result.distributions, values.debug);
    }
    console.log(JSON.stringify({ scored: result.confidences.length, out: values.out }));
    return 0;
  }
  usage();
}

if (require.main === module) {
  main(process.argv.slice(2))
    .then((code) => process.exit(code))
    .catch((err) => {
      console.error(`error: ${err.message ?? err}`);
      process.exit(2);
    });
}
