/** Controller: fetch tasks, render, submit decisions, advance the queue.
 *
 * Server rejections (409/422) surface in the error banner with the local
 * state untouched so the annotator can correct and resubmit; a fresh
 * task replaces the state (and restarts the timer) only on success.
 */

import { ApiClient } from "./api.js";
import { ViewState } from "./state.js";
import { ApiError } from "./types.js";
import { flashError, renderDone, renderViews } from "./views.js";

export interface AppOptions {
  annotator: string;
  relation: string;
  now?: () => number;
}

export class AnnotationApp {
  state: ViewState | null = null;

  constructor(
    private readonly root: HTMLElement,
    private readonly api: ApiClient,
    private readonly options: AppOptions,
  ) {}

  async loadNextTask(): Promise<void> {
    const task = await this.api.getTask(this.options.annotator, this.options.relation);
    if (task === null) {
      this.state = null;
      renderDone(this.root, this.options.relation);
      return;
    }
    this.state = new ViewState(task, this.options.now);
    this.render();
  }

  private render(): void {
    if (!this.state) return;
    renderViews(this.root, this.state, {
      onSubmit: (expresses) => void this.submit(expresses),
      onDelete: () => void this.deleteSentence(),
      onIgnore: () => void this.ignoreSentence(),
    });
  }

  async submit(expresses: boolean): Promise<void> {
    if (!this.state) return;
    if (!this.state.canSubmit(expresses)) {
      flashError(this.root, "select at least one subject and one object first");
      return;
    }
    const body = this.state.buildResponse(this.options.annotator, expresses);
    try {
      await this.api.postResponse(body);
    } catch (err) {
      if (err instanceof ApiError) {
        flashError(this.root, `${err.code}: ${err.message}`);
        return; // state preserved for correction
      }
      throw err;
    }
    await this.loadNextTask();
  }

  async deleteSentence(): Promise<void> {
    if (!this.state) return;
    try {
      await this.api.deleteSentence(this.state.task.sentence_id);
    } catch (err) {
      if (err instanceof ApiError) {
        flashError(this.root, `${err.code}: ${err.message}`);
        return;
      }
      throw err;
    }
    await this.loadNextTask();
  }

  async ignoreSentence(): Promise<void> {
    if (!this.state) return;
    try {
      await this.api.ignoreSentence(
        this.state.task.sentence_id,
        this.options.relation,
      );
    } catch (err) {
      if (err instanceof ApiError) {
        flashError(this.root, `${err.code}: ${err.message}`);
        return;
      }
      throw err;
    }
    await this.loadNextTask();
  }
}

export function mount(root: HTMLElement, options: AppOptions, baseUrl = ""): AnnotationApp {
  const app = new AnnotationApp(root, new ApiClient(baseUrl), options);
  void app.loadNextTask();
  return app;
}
