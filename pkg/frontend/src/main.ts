import { ApiClient } from './api';
import { BallsBuilder, DEFAULT_TOTAL_BALLS, MAX_TOTAL_BALLS, MIN_TOTAL_BALLS } from './builder';
import { debounce } from './debounce';
import type { DiagnosticsDoc, ExtremeJudgment, SessionDoc } from './types';
import { WhatIfPanel } from './whatif';
import { WizardController } from './wizard';

const api = new ApiClient('');
const wizard = new WizardController(api);
let builder: BallsBuilder | null = null;
let useMidpointSplit = false;

const root = document.getElementById('app') as HTMLElement;

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  ...children: Array<Node | string>
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [k, v] of Object.entries(attrs)) node.setAttribute(k, v);
  node.append(...children);
  return node;
}

function fmt(x: number | null | undefined): string {
  return x === null || x === undefined ? '—' : String(x);
}

function errorBanner(): HTMLElement {
  const err = wizard.lastError;
  if (!err) return el('div');
  const hint = err.expectedStage ? ` (server expects stage: ${err.expectedStage})` : '';
  return el('div', { class: 'error', role: 'alert' }, `${err.message}${hint}`);
}

function field(label: string, input: HTMLElement): HTMLElement {
  return el('label', { class: 'field' }, el('span', {}, label), input);
}

function textInput(name: string, value = ''): HTMLInputElement {
  return el('input', { name, type: 'text', value });
}

function numberInput(name: string, value = '', step = 'any'): HTMLInputElement {
  return el('input', { name, type: 'number', step, value });
}

function renderContextForm(): HTMLElement {
  const form = el('form', { class: 'stage-form' });
  const names = [
    'population', 'unit', 'treatment', 'control', 'outcome', 'time_horizon', 'assignment',
  ] as const;
  for (const name of names) form.append(field(name.replace('_', ' '), textInput(name)));
  form.append(field('expected sample size', numberInput('sample_size_estimate', '100', '1')));
  form.append(el('button', { type: 'submit' }, 'Describe study'));
  form.addEventListener('submit', async (ev) => {
    ev.preventDefault();
    const data = new FormData(form);
    try {
      await wizard.submitContext({
        population: String(data.get('population')),
        unit: String(data.get('unit')),
        treatment: String(data.get('treatment')),
        control: String(data.get('control')),
        outcome: String(data.get('outcome')),
        time_horizon: String(data.get('time_horizon')),
        assignment: String(data.get('assignment')),
        sample_size_estimate: Number(data.get('sample_size_estimate')),
      });
    } catch { /* surfaced via lastError */ }
    render();
  });
  return form;
}

function renderAtePreForm(): HTMLElement {
  const form = el('form', { class: 'stage-form' });
  const input = numberInput('ate_pre');
  form.append(
    el('p', {}, 'Before any decomposition: what average effect do you expect?'),
    field('initial average effect', input),
    el('button', { type: 'submit' }, 'Record'),
  );
  form.addEventListener('submit', async (ev) => {
    ev.preventDefault();
    try {
      await wizard.submitAtePre(Number(input.value));
    } catch { /* surfaced via lastError */ }
    render();
  });
  return form;
}

function extremeInputs(kind: 'largest' | 'smallest'): HTMLElement {
  return el(
    'fieldset', {},
    el('legend', {}, `${kind} plausible individual effect`),
    field('effect', numberInput(`${kind}_effect`)),
    field('who looks like this?', textInput(`${kind}_description`)),
    field('uncertainty (+/-)', numberInput(`${kind}_uncertainty`, '0')),
    field('share of people at this extreme', numberInput(`${kind}_tail_share`, '0.1')),
  );
}

function readExtreme(data: FormData, kind: 'largest' | 'smallest'): ExtremeJudgment {
  return {
    kind,
    effect: Number(data.get(`${kind}_effect`)),
    description: String(data.get(`${kind}_description`)),
    uncertainty: Number(data.get(`${kind}_uncertainty`)),
    tail_share: Number(data.get(`${kind}_tail_share`)),
  };
}

function renderExtremesForm(): HTMLElement {
  const form = el('form', { class: 'stage-form' },
    extremeInputs('largest'), extremeInputs('smallest'),
    el('button', { type: 'submit' }, 'Record extremes'));
  form.addEventListener('submit', async (ev) => {
    ev.preventDefault();
    const data = new FormData(form);
    try {
      await wizard.submitExtremes(readExtreme(data, 'largest'), readExtreme(data, 'smallest'));
    } catch { /* surfaced via lastError */ }
    render();
  });
  return form;
}

const liveAteReadout = el('p', { class: 'readout' }, 'implied average: —');

const previewAte = debounce(async () => {
  if (!builder) return;
  try {
    // the server owns all statistics; even the live preview is a round trip
    const alloc = builder.toAllocation();
    const result = await api.ate({
      distribution: {
        schema_version: 1,
        components: alloc.bin_edges.slice(0, -1).map((lo, i) => ({
          weight: alloc.balls[i] / alloc.total_balls,
          kind: 'point_mass' as const,
          value: 0.5 * (lo + alloc.bin_edges[i + 1]),
        })).filter((c) => c.weight > 0),
      },
    });
    liveAteReadout.textContent = `implied average: ${result.ate}`;
  } catch {
    liveAteReadout.textContent = 'implied average: —';
  }
}, 200);

function renderBuilder(session: SessionDoc): HTMLElement {
  const lo = session.smallest!.effect;
  const hi = session.largest!.effect;
  if (!builder) builder = new BallsBuilder(Math.min(lo, hi), Math.max(lo, hi));

  const container = el('div', { class: 'builder' });
  const redraw = () => {
    container.replaceChildren();
    const b = builder!;
    const counts = b.ballCounts();
    const mids = b.binMidpoints();
    const maxCount = Math.max(1, ...counts);
    for (let i = 0; i < b.nBins; i += 1) {
      const bar = el('div', { class: 'bin' },
        el('div', {
          class: 'bar',
          style: `height:${(100 * counts[i]) / maxCount}%`,
        }),
        el('span', { class: 'count' }, String(counts[i])),
        el('span', { class: 'mid' }, mids[i].toPrecision(3)),
      );
      const take = el('button', { type: 'button', title: 'move a ball left' }, '–');
      const give = el('button', { type: 'button', title: 'move a ball here' }, '+');
      take.addEventListener('click', () => {
        // "-" sends one of this bin's balls to its neighbour
        if (b.moveBall(i, i === 0 ? 1 : i - 1)) { redraw(); previewAte(); }
      });
      give.addEventListener('click', () => {
        const donor = counts.findIndex((c, j) => j !== i && c > 0);
        if (donor >= 0 && b.moveBall(donor, i)) { redraw(); previewAte(); }
      });
      bar.append(take, give);
      container.append(bar);
    }

    const granularity = numberInput('total_balls', String(b.totalBalls), '1');
    granularity.min = String(MIN_TOTAL_BALLS);
    granularity.max = String(MAX_TOTAL_BALLS);
    granularity.addEventListener('change', () => {
      b.setTotalBalls(Number(granularity.value));
      redraw();
      previewAte();
    });
    container.append(
      field(`granularity (${MIN_TOTAL_BALLS}–${MAX_TOTAL_BALLS} balls, default ${DEFAULT_TOTAL_BALLS})`, granularity),
      liveAteReadout,
    );

    const submit = el('button', { type: 'button' }, 'Use this distribution');
    submit.addEventListener('click', async () => {
      try {
        await wizard.submitAllocation(b.toAllocation());
      } catch { /* surfaced via lastError */ }
      render();
    });
    container.append(submit);
  };
  redraw();
  previewAte();
  return container;
}

function renderAllocation(session: SessionDoc): HTMLElement {
  const wrap = el('div', { class: 'stage-form' });
  const toggle = el('button', { type: 'button' },
    useMidpointSplit ? 'switch to balls-in-bins' : 'switch to midpoint split');
  toggle.addEventListener('click', () => {
    useMidpointSplit = !useMidpointSplit;
    render();
  });
  wrap.append(toggle);

  if (useMidpointSplit) {
    const form = el('form', {});
    const lower = numberInput('share_lower', '0.5');
    form.append(
      el('p', {}, 'What share of people fall below the midpoint of your range?'),
      field('share below midpoint', lower),
      el('button', { type: 'submit' }, 'Use this split'),
    );
    form.addEventListener('submit', async (ev) => {
      ev.preventDefault();
      const share = Number(lower.value);
      try {
        await wizard.submitAllocation({
          type: 'midpoint_split', share_lower: share, share_upper: 1 - share,
        });
      } catch { /* surfaced via lastError */ }
      render();
    });
    wrap.append(form);
  } else {
    wrap.append(renderBuilder(session));
  }
  return wrap;
}

function renderNullShare(): HTMLElement {
  const form = el('form', { class: 'stage-form' });
  const slider = el('input', {
    name: 'p_null', type: 'range', min: '0', max: '1', step: '0.01', value: '0.5',
  });
  const label = el('span', { class: 'readout' }, '0.5');
  slider.addEventListener('input', () => { label.textContent = slider.value; });
  form.append(
    el('p', {}, 'What share of units will the treatment simply not reach or not move?'),
    field('share with zero effect', slider), label,
    el('button', { type: 'submit' }, 'Apply null share'),
  );
  form.addEventListener('submit', async (ev) => {
    ev.preventDefault();
    try {
      await wizard.submitNullShare(Number(slider.value));
    } catch { /* surfaced via lastError */ }
    render();
  });
  return form;
}

function renderWhatIf(session: SessionDoc): HTMLElement {
  const panelOut = el('dl', { class: 'readouts' });
  const show = (diag: DiagnosticsDoc) => {
    panelOut.replaceChildren(
      el('dt', {}, 'power'), el('dd', {}, String(diag.power)),
      el('dt', {}, 'wrong-sign rate'), el('dd', {}, String(diag.type_s)),
      el('dt', {}, 'exaggeration'), el('dd', {}, String(diag.exaggeration)),
    );
  };
  const panel = new WhatIfPanel(api, show, (msg) => {
    panelOut.replaceChildren(el('dd', { class: 'error' }, msg));
  });
  panel.setDistribution(session.distribution!);

  const nInput = numberInput('n_per_arm', '63', '1');
  nInput.addEventListener('input', () => panel.update({ nPerArm: Number(nInput.value) }));
  panel.update({ nPerArm: 63 });

  return el('div', { class: 'whatif' },
    el('h3', {}, 'What if you ran the study?'),
    field('participants per arm', nInput),
    panelOut);
}

function renderDerived(session: SessionDoc): HTMLElement {
  const form = el('form', { class: 'stage-form' });
  const reflection = textInput('reflection');
  form.append(
    el('p', { class: 'readout' },
      `initial guess ${fmt(session.ate_pre)} → derived average ${fmt(session.ate_post)}`),
    renderWhatIf(session),
    field('how do the two compare? what changed your mind?', reflection),
    el('button', { type: 'submit' }, 'Finish'),
  );
  form.addEventListener('submit', async (ev) => {
    ev.preventDefault();
    try {
      await wizard.submitReflection(reflection.value);
    } catch { /* surfaced via lastError */ }
    render();
  });
  return form;
}

function renderCompared(session: SessionDoc): HTMLElement {
  const hist = el('div', { class: 'builder final' });
  const alloc = session.allocation;
  if (alloc && alloc.type === 'balls') {
    const maxBalls = Math.max(1, ...alloc.balls);
    alloc.balls.forEach((count, i) => {
      hist.append(el('div', { class: 'bin' },
        el('div', { class: 'bar', style: `height:${(100 * count) / maxBalls}%` }),
        el('span', { class: 'mid' },
          (0.5 * (alloc.bin_edges[i] + alloc.bin_edges[i + 1])).toPrecision(3))));
    });
  }
  return el('div', { class: 'comparison' },
    el('h3', {}, 'Before and after'),
    el('p', { class: 'readout', id: 'ate-pre' }, `initial: ${fmt(session.ate_pre)}`),
    el('p', { class: 'readout', id: 'ate-post' }, `derived: ${fmt(session.ate_post)}`),
    hist,
    el('p', {}, session.reflection ?? ''));
}

const STAGE_TITLES: Record<string, string> = {
  context: '1. Describe the study',
  ate_pre: '2. Initial average effect',
  extremes: '3. Largest and smallest plausible effects',
  allocation: '4. Spread the people across the range',
  null_share: '5. Who does the treatment never touch?',
  derived: '6. Derived average and what-ifs',
  compared: '7. Before vs after',
};

function render(): void {
  const session = wizard.state;
  root.replaceChildren();
  root.append(el('h2', {}, STAGE_TITLES[wizard.stage]), errorBanner());
  if (!session) {
    const start = el('button', { type: 'button' }, 'Start a session');
    start.addEventListener('click', async () => {
      const doc = await wizard.start();
      window.localStorage.setItem('effectmix-session', doc.id);
      render();
    });
    root.append(start);
    return;
  }
  for (const warning of session.warnings) {
    root.append(el('div', { class: 'warning' }, warning));
  }
  switch (session.stage) {
    case 'context': root.append(renderContextForm()); break;
    case 'ate_pre': root.append(renderAtePreForm()); break;
    case 'extremes': root.append(renderExtremesForm()); break;
    case 'allocation': root.append(renderAllocation(session)); break;
    case 'null_share': root.append(renderNullShare()); break;
    case 'derived': root.append(renderDerived(session)); break;
    case 'compared': root.append(renderCompared(session)); break;
  }
}

async function boot(): Promise<void> {
  const saved = window.localStorage.getItem('effectmix-session');
  if (saved) {
    try {
      await wizard.resume(saved); // reload restores server state verbatim
    } catch {
      window.localStorage.removeItem('effectmix-session');
    }
  }
  render();
}

void boot();
